// Auto-generated Gauss tables (log(1/t) weight on (0,1) and Legendre on (0,1)).
// Moments of log(1/t): 1/(k+1)^2; computed at 120-digit precision.
#include "stokesbem/tables.hpp"

namespace stokesbem::tables {

const GaussTable kGaussLog01[] = {
  {2, {0.112008806166976183, 0.6022769081187381028}, {0.7185393190303844407, 0.2814606809696155593}},
  {3, {0.063890793087325405, 0.3689970637156187655, 0.7668803039389414554}, {0.5134045522323633251, 0.3919800412014875548, 0.09461540656614912006}},
  {4, {0.0414484801993832208, 0.2452749143206022519, 0.5561654535602758372, 0.8489823945329851746}, {0.3834640681451351249, 0.3868753177747626273, 0.1904351269501424154, 0.03922548712995983245}},
  {5, {0.0291344721519720533, 0.1739772133208976287, 0.4117025202849020432, 0.6773141745828203807, 0.8947713610310082836}, {0.2978934717828944573, 0.3497762265132241804, 0.2344882900440524189, 0.09893045951663314698, 0.01891155214319579649}},
  {6, {0.021634005844116949, 0.1295833911549507961, 0.3140204499147655088, 0.5386572173518021445, 0.7569153373774028522, 0.9226688513721202373}, {0.2387636625785475697, 0.308286573273946793, 0.245317426563210386, 0.1420087565664766854, 0.05545462232488629002, 0.01016895869293227589}},
  {7, {0.01671935540825851594, 0.1001856779156751216, 0.246294246207930599, 0.4334634932570331058, 0.6323509880477660885, 0.8111186267401055765, 0.9408481667433477218}, {0.1961693894252482075, 0.2703026442472729821, 0.2396818730076909483, 0.1657757748104329066, 0.08894322713765796444, 0.03319430435657106703, 0.005932787015125923999}},
  {8, {0.01332024416089246501, 0.07975042901389493841, 0.1978710293261880538, 0.3541539943519094197, 0.5294585752349172777, 0.7018145299390999638, 0.849379320441106676, 0.9533264500563597888}, {0.1644166047280028868, 0.2375256100233060205, 0.2268419844319191264, 0.175754079006070245, 0.1129240302467590519, 0.0578722107177820724, 0.02097907374213297804, 0.003686407104027619013}},
  {9, {0.01086933608417547711, 0.06498366633800793941, 0.1622293980238829387, 0.2937499039716746581, 0.4466318819054680372, 0.6054816627761286208, 0.7541101371571635667, 0.8772658288358382532, 0.9622505594102818414}, {0.1400684387481347343, 0.2097722052010304475, 0.2114271498966027285, 0.1771562339380799895, 0.1277992280332054959, 0.07847890261156217255, 0.03902250498539909685, 0.01386729554959302329, 0.002408041036392311573}},
  {10, {0.009042630962199650637, 0.0539712662225006295, 0.1353118246392507749, 0.2470524162871598242, 0.380212539609332334, 0.5237923179718432012, 0.6657752055164245972, 0.7941904160119662174, 0.8981610912190035382, 0.9688479887186335394}, {0.120955131954570515, 0.1863635425640718703, 0.1956608732777599827, 0.1735771421829069208, 0.1356956729954842017, 0.09364675853811052599, 0.05578772735141587408, 0.02715981089923333115, 0.009515182602848514999, 0.001638157633598263255}},
  {11, {0.007643941174637706629, 0.04554182825657891855, 0.1145222974551245837, 0.2103785812270335309, 0.326695553221692848, 0.4554532469288134383, 0.5876483563590844079, 0.7139638500125614405, 0.8254532178018118042, 0.9141939216125431379, 0.9738602562755861523}, {0.1056522560991004913, 0.1665716806006290486, 0.1805632182877537248, 0.1672787367737841793, 0.1386970574016312205, 0.1038334333650440603, 0.06953669788873523235, 0.04054160080359632957, 0.01943540247621817278, 0.006737429342450062702, 0.001152486961057477783}},
  {12, {0.006548722279080058789, 0.03894680956044995916, 0.09815026310600662886, 0.1811385815906315774, 0.2832200676673725547, 0.3984344351634366437, 0.5199526267923526627, 0.6405109167161064543, 0.7528650120518305784, 0.8502400241623022007, 0.926749683223914101, 0.9777561296899974792}, {0.09319269144393132449, 0.1497518275763223642, 0.1665574543645930053, 0.1596335594369876512, 0.1384248318648356211, 0.1100165706357211623, 0.07996182177082897026, 0.05240695482464177065, 0.03007108887376118712, 0.01424924558799827911, 0.004899924582321760939, 0.0008340290380569033647}},
  {13, {0.00567476625624266903, 0.03369010879903253675, 0.08503675447417502809, 0.1574975594778890287, 0.2475695788768431461, 0.3507443123608552004, 0.4617737467616102462, 0.5749594665255613207, 0.6844598803504300425, 0.7846025688103470805, 0.8701864284078883888, 0.9367578293067513934, 0.9808434518115909485}, {0.08290049679327578782, 0.1353686731657445004, 0.1537732843922922009, 0.1514581585099881906, 0.1360403365372830607, 0.1131768228816338034, 0.08737443048004525824, 0.06216023064180486952, 0.0400877289341658519, 0.02272384493997219533, 0.01067123041296844409, 0.00364649227597414008, 0.0006182700348516970769}},
  {14, {0.004966003573868542244, 0.02943254011888517829, 0.07437629222453576261, 0.1381384919891862818, 0.2180556484989590781, 0.3106620839181019832, 0.4118724751777502072, 0.5171793073986543297, 0.6218648597285111197, 0.7212207452081088537, 0.8107659880715898564, 0.8864540380344346572, 0.9448591394618186389, 0.98333102648567848}, {0.0742912250675104125, 0.1229887724693229143, 0.1421993065625233557, 0.143229297641264222, 0.1323450837720852093, 0.1141358757366764753, 0.09228303807907361322, 0.06975367329393756455, 0.04883032360051356464, 0.03110179606441614112, 0.01746281195019609383, 0.008142423429875936133, 0.002768436418563937332, 0.0004679359140405601353}},
  {15, {0.004383110175475403835, 0.0259358981053306161, 0.06559609541231624525, 0.1221019340733316033, 0.193395262374007116, 0.2767728387061020244, 0.3690151271397429438, 0.4665243289647065827, 0.5654734737918173064, 0.6619629190124564214, 0.7521788833787857988, 0.8325480338661895893, 0.8998820501208980843, 0.9515061887434099027, 0.9853644681221319389}, {0.0670099789164937136, 0.1122641502867057418, 0.1317601770396799037, 0.1352176490619347251, 0.1278817986456803704, 0.1135329074902194213, 0.09520523978435865851, 0.07538931416739595434, 0.05607842449265371799, 0.03876829537501823111, 0.02445148326875007596, 0.01362463013823884691, 0.0063164475985907612, 0.002138889915944471348, 0.0003606138183354066469}},
  {16, {0.003897834487115915924, 0.02302894561687323982, 0.05828039830624041235, 0.1086783650910540365, 0.1726094549098439378, 0.2479370544705784951, 0.332094549129917156, 0.4221839105819486001, 0.5150824733814626035, 0.6075561204477287241, 0.6963756532282140612, 0.7784325658732654052, 0.8508502697153910832, 0.9110868572222719054, 0.9570255717035421576, 0.9870478002479844768}, {0.06079171004359123285, 0.1029156775175821444, 0.1223556620460091936, 0.1275692469370159887, 0.1230135746000709154, 0.1118472448554857226, 0.09659638515212434125, 0.07935666435147313878, 0.0618504945819652071, 0.04543524650772666863, 0.03109897475158180641, 0.01945976592736084208, 0.01077625496320552565, 0.004972542890087641713, 0.001678201110051194515, 0.0002823537646684363218}},
};
const int kGaussLog01_count = 15;

const GaussTable kGaussLegendre01[] = {
  {1, {0.5}, {1.0}},
  {2, {0.2113248654051871177, 0.7886751345948128823}, {0.5, 0.5}},
  {3, {0.1127016653792583115, 0.5, 0.8872983346207416885}, {0.2777777777777777778, 0.4444444444444444444, 0.2777777777777777778}},
  {4, {0.06943184420297371239, 0.3300094782075718676, 0.6699905217924281324, 0.9305681557970262876}, {0.1739274225687269287, 0.3260725774312730713, 0.3260725774312730713, 0.1739274225687269287}},
  {5, {0.0469100770306680036, 0.2307653449471584545, 0.5, 0.7692346550528415455, 0.9530899229693319964}, {0.1184634425280945438, 0.239314335249683234, 0.2844444444444444444, 0.239314335249683234, 0.1184634425280945438}},
  {6, {0.03376524289842398609, 0.1693953067668677432, 0.3806904069584015457, 0.6193095930415984543, 0.8306046932331322568, 0.9662347571015760139}, {0.08566224618958517252, 0.1803807865240693038, 0.2339569672863455237, 0.2339569672863455237, 0.1803807865240693038, 0.08566224618958517252}},
  {7, {0.02544604382862073774, 0.1292344072003027801, 0.2970774243113014165, 0.5, 0.7029225756886985835, 0.8707655927996972199, 0.9745539561713792623}, {0.06474248308443484664, 0.139852695744638334, 0.1909150252525594725, 0.2089795918367346939, 0.1909150252525594725, 0.139852695744638334, 0.06474248308443484664}},
  {8, {0.01985507175123188416, 0.1016667612931866302, 0.2372337950418355071, 0.4082826787521750975, 0.5917173212478249025, 0.7627662049581644929, 0.8983332387068133698, 0.9801449282487681158}, {0.05061426814518812958, 0.1111905172266872353, 0.1568533229389436437, 0.1813418916891809915, 0.1813418916891809915, 0.1568533229389436437, 0.1111905172266872353, 0.05061426814518812958}},
  {9, {0.01591988024618695508, 0.08198444633668210285, 0.1933142836497048013, 0.3378732882980955355, 0.5, 0.6621267117019044645, 0.8066857163502951987, 0.9180155536633178971, 0.9840801197538130449}, {0.04063719418078720599, 0.09032408034742870203, 0.1303053482014677312, 0.15617353852000142, 0.1651196775006298816, 0.15617353852000142, 0.1303053482014677312, 0.09032408034742870203, 0.04063719418078720599}},
  {10, {0.01304673574141413996, 0.06746831665550774463, 0.1602952158504877969, 0.2833023029353764046, 0.4255628305091843946, 0.5744371694908156054, 0.7166976970646235954, 0.8397047841495122031, 0.9325316833444922554, 0.98695326425858586}, {0.0333356721543440688, 0.07472567457529029657, 0.109543181257991022, 0.1346333596549981775, 0.1477621123573764351, 0.1477621123573764351, 0.1346333596549981775, 0.109543181257991022, 0.07472567457529029657, 0.0333356721543440688}},
  {11, {0.0108856709269715036, 0.05646870011595235046, 0.134923997212975338, 0.240451935396594092, 0.3652284220238275138, 0.5, 0.6347715779761724862, 0.759548064603405908, 0.865076002787024662, 0.9435312998840476495, 0.9891143290730284964}, {0.02783428355808683324, 0.06279018473245231232, 0.09314510546386712571, 0.11659688229599524, 0.1314022722551233311, 0.1364625433889503154, 0.1314022722551233311, 0.11659688229599524, 0.09314510546386712571, 0.06279018473245231232, 0.02783428355808683324}},
  {12, {0.009219682876640374655, 0.04794137181476257166, 0.1150486629028476565, 0.2063410228566912764, 0.3160842505009099031, 0.4373832957442655423, 0.5626167042557344577, 0.6839157494990900969, 0.7936589771433087236, 0.8849513370971523435, 0.9520586281852374283, 0.9907803171233596253}, {0.0235876681932559136, 0.05346966299765921548, 0.08003916427167311317, 0.1015837133615329609, 0.1167462682691774044, 0.1245735229067013925, 0.1245735229067013925, 0.1167462682691774044, 0.1015837133615329609, 0.08003916427167311317, 0.05346966299765921548, 0.0235876681932559136}},
  {13, {0.007908472640705925264, 0.0412008003885110174, 0.0992109546333450436, 0.1788253302798298897, 0.2757536244817765736, 0.384770842022432603, 0.5, 0.615229157977567397, 0.7242463755182234264, 0.8211746697201701103, 0.9007890453666549564, 0.9587991996114889826, 0.9920915273592940747}, {0.02024200238265793976, 0.04606074991886422396, 0.06943675510989361923, 0.08907299038097286914, 0.1039080237684442512, 0.1131415901314486192, 0.1162757766154369551, 0.1131415901314486192, 0.1039080237684442512, 0.08907299038097286914, 0.06943675510989361923, 0.04606074991886422396, 0.02024200238265793976}},
  {14, {0.006858095651593830579, 0.03578255816821324133, 0.08639934246511750341, 0.1563535475941572649, 0.242375681820922954, 0.3404438155360551198, 0.445972525646328169, 0.554027474353671831, 0.6595561844639448802, 0.757624318179077046, 0.8436464524058427351, 0.9136006575348824966, 0.9642174418317867587, 0.9931419043484061694}, {0.01755973016587593152, 0.0400790435798801049, 0.06075928534395159234, 0.07860158357909676728, 0.09276919873896890687, 0.102599231860647802, 0.1076319267315788951, 0.1076319267315788951, 0.102599231860647802, 0.09276919873896890687, 0.07860158357909676728, 0.06075928534395159234, 0.0400790435798801049, 0.01755973016587593152}},
  {15, {0.006003740989757285755, 0.03136330379964704785, 0.0758967082947863919, 0.1377911343199149763, 0.2145139136957305762, 0.3029243264612183151, 0.3994029530012827388, 0.5, 0.6005970469987172612, 0.6970756735387816849, 0.7854860863042694238, 0.8622088656800850237, 0.9241032917052136081, 0.9686366962003529522, 0.9939962590102427142}, {0.01537662099805863418, 0.03518302374405406235, 0.05357961023358596751, 0.06978533896307715722, 0.08313460290849696678, 0.09308050000778110551, 0.09921574266355578823, 0.1012891209627806364, 0.09921574266355578823, 0.09308050000778110551, 0.08313460290849696678, 0.06978533896307715722, 0.05357961023358596751, 0.03518302374405406235, 0.01537662099805863418}},
  {16, {0.005299532504175033702, 0.02771248846338371196, 0.06718439880608412806, 0.1222977958224984831, 0.1910618777986781258, 0.2709916111713863068, 0.3591982246103705434, 0.4524937450811812799, 0.5475062549188187201, 0.6408017753896294566, 0.7290083888286136932, 0.8089381222013218742, 0.8777022041775015169, 0.9328156011939158719, 0.972287511536616288, 0.9947004674958249663}, {0.01357622970587704743, 0.03112676196932394643, 0.0475792558412463924, 0.06231448562776693603, 0.07479799440828836604, 0.08457825969750126909, 0.09130170752246179443, 0.09472530522753424814, 0.09472530522753424814, 0.09130170752246179443, 0.08457825969750126909, 0.07479799440828836604, 0.06231448562776693603, 0.0475792558412463924, 0.03112676196932394643, 0.01357622970587704743}},
  {17, {0.004712262342791332162, 0.02466223911561611939, 0.05988042313650704894, 0.1092429980515992965, 0.1711644203916546171, 0.2436547314567615161, 0.3243841182730618424, 0.4107579092520760721, 0.5, 0.5892420907479239279, 0.6756158817269381576, 0.7563452685432384839, 0.8288355796083453829, 0.8907570019484007035, 0.9401195768634929511, 0.9753377608843838806, 0.9952877376572086678}, {0.01207415143427396598, 0.02772976468699360056, 0.04251807415858959044, 0.05594192359670198555, 0.06756818423426273664, 0.07702288053840514404, 0.08400205107822502225, 0.08828135268349632316, 0.08972323517810326273, 0.08828135268349632316, 0.08400205107822502225, 0.07702288053840514404, 0.06756818423426273664, 0.05594192359670198555, 0.04251807415858959044, 0.02772976468699360056, 0.01207415143427396598}},
  {18, {0.004217415789534526635, 0.02208802521430112241, 0.0536987667512221304, 0.09814752051373844216, 0.1541564784698233961, 0.2201145844630262327, 0.294124419268578677, 0.3740568871542472452, 0.4576124934791323494, 0.5423875065208676506, 0.6259431128457527548, 0.705875580731421323, 0.7798854155369737673, 0.8458435215301766039, 0.9018524794862615578, 0.9463012332487778696, 0.9779119747856988776, 0.9957825842104654734}, {0.01080800676324165516, 0.02485727444748489823, 0.03821286512744452826, 0.05047102205314358278, 0.06127760335573923009, 0.0703214573353253256, 0.07734233756313262246, 0.08213824187291636149, 0.08457119148157179592, 0.08457119148157179592, 0.08213824187291636149, 0.07734233756313262246, 0.0703214573353253256, 0.06127760335573923009, 0.05047102205314358278, 0.03821286512744452826, 0.02485727444748489823, 0.01080800676324165516}},
  {19, {0.003796578078207798405, 0.01989592393258498457, 0.04842204819259104918, 0.08864267173142858751, 0.1395169113323853107, 0.1997273476691594883, 0.2677146293120195271, 0.341717950018185084, 0.4198206771798873121, 0.5, 0.5801793228201126879, 0.658282049981814916, 0.7322853706879804729, 0.8002726523308405117, 0.8604830886676146893, 0.9113573282685714125, 0.9515779518074089508, 0.9801040760674150154, 0.9962034219217922016}, {0.009730894114863238518, 0.02240711338284980017, 0.03452227136882061329, 0.04574501081122499973, 0.05578332277366699736, 0.06437698126966811384, 0.07130335108680330589, 0.07638302103292983339, 0.07948442169697717382, 0.08052722492439184799, 0.07948442169697717382, 0.07638302103292983339, 0.07130335108680330589, 0.06437698126966811384, 0.05578332277366699736, 0.04574501081122499973, 0.03452227136882061329, 0.02240711338284980017, 0.009730894114863238518}},
  {20, {0.003435700407452537607, 0.01801403636104310437, 0.04388278587433704707, 0.0804415140888905883, 0.1268340467699246037, 0.1819731596367424873, 0.244566499024586451, 0.3131469556422902197, 0.386107074429177461, 0.4617367394332513331, 0.5382632605667486669, 0.613892925570822539, 0.6868530443577097803, 0.755433500975413549, 0.8180268403632575127, 0.8731659532300753963, 0.9195584859111094117, 0.9561172141256629529, 0.9819859636389568956, 0.9965642995925474624}, {0.008807003569576059156, 0.02030071490019347067, 0.03133602416705453178, 0.04163837078835237436, 0.05096505990862021752, 0.05909726598075920866, 0.06584431922458831345, 0.07104805465919102566, 0.07458649323630187339, 0.07637669356536292535, 0.07637669356536292535, 0.07458649323630187339, 0.07104805465919102566, 0.06584431922458831345, 0.05909726598075920866, 0.05096505990862021752, 0.04163837078835237436, 0.03133602416705453178, 0.02030071490019347067, 0.008807003569576059156}},
};
const int kGaussLegendre01_count = 20;



const GaussTable& gauss_legendre01(int n) {
    if (n < 1) n = 1;
    if (n > kGaussLegendre01_count) n = kGaussLegendre01_count;
    return kGaussLegendre01[n - 1];
}

const GaussTable& gauss_log01(int n) {
    if (n < 2) n = 2;
    if (n > kGaussLog01_count + 1) n = kGaussLog01_count + 1;
    return kGaussLog01[n - 2];
}

}  // namespace stokesbem::tables
