namespace stokesbem {}
