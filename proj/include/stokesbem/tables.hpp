#pragma once

namespace stokesbem::tables {

// Nodes/weights on (0,1). kGaussLog01 integrates f(t) log(1/t) dt;
// kGaussLegendre01 integrates f(t) dt.
struct GaussTable {
    int n;
    double x[20];
    double w[20];
};

extern const GaussTable kGaussLog01[];   // n = 2..16
extern const int kGaussLog01_count;
extern const GaussTable kGaussLegendre01[];  // n = 1..20
extern const int kGaussLegendre01_count;

const GaussTable& gauss_legendre01(int n);
const GaussTable& gauss_log01(int n);

}  // namespace stokesbem::tables
