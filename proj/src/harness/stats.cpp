#include "refine_search/harness/stats.hpp"

#include <fmt/format.h>

#include <array>
#include <cmath>
#include <numeric>

namespace refine_search::harness {

double pass_at_k(const std::vector<SearchTrace>& traces, int j) {
    if (traces.empty()) throw Error("pass_at_k needs at least one trace");
    if (j < 0) throw Error("pass_at_k needs j >= 0");
    int solved = 0;
    for (const auto& t : traces) {
        const auto prefix = std::min<std::size_t>(static_cast<std::size_t>(j), t.nodes.size());
        if (!t.hidden_verdicts_complete(prefix)) {
            throw Error(fmt::format("unevaluated trace: {} ({})", t.task_id, t.label));
        }
        for (std::size_t i = 0; i < prefix; ++i) {
            if (*t.nodes[i].hidden_result) {
                ++solved;
                break;
            }
        }
    }
    return static_cast<double>(solved) / static_cast<double>(traces.size());
}

namespace {

// t_{0.975, df} for df = 1..200, computed to 20 digits with mpmath
// (scripts/gen_t_table.py).
constexpr std::array<double, 200> kT975 = {
    12.706204736174704646,  // df = 1
    4.3026527297494638523,  // df = 2
    3.1824463052837095927,  // df = 3
    2.7764451051977943578,  // df = 4
    2.5705818356363155147,  // df = 5
    2.4469118511449699711,  // df = 6
    2.3646242515927853417,  // df = 7
    2.3060041352041666833,  // df = 8
    2.2621571627982055426,  // df = 9
    2.2281388519862747484,  // df = 10
    2.2009851600916398679,  // df = 11
    2.1788128296672288663,  // df = 12
    2.1603686564627925015,  // df = 13
    2.1447866879178038287,  // df = 14
    2.1314495455597756821,  // df = 15
    2.1199052992212546745,  // df = 16
    2.1098155778333170859,  // df = 17
    2.1009220402410384881,  // df = 18
    2.0930240544083097692,  // df = 19
    2.0859634472658648427,  // df = 20
    2.0796138447276803951,  // df = 21
    2.0738730679040261658,  // df = 22
    2.0686576104190486515,  // df = 23
    2.0638985616280258492,  // df = 24
    2.0595385527532977489,  // df = 25
    2.0555294386428732135,  // df = 26
    2.0518305164802855562,  // df = 27
    2.0484071417952451599,  // df = 28
    2.0452296421327042982,  // df = 29
    2.04227245630123831,  // df = 30
    2.0395134463964084879,  // df = 31
    2.0369333434601019588,  // df = 32
    2.0345152974493386962,  // df = 33
    2.0322445093177189645,  // df = 34
    2.0301079282503431796,  // df = 35
    2.0280940009804509302,  // df = 36
    2.0261924630291097749,  // df = 37
    2.0243941639119696444,  // df = 38
    2.0226909200367611356,  // df = 39
    2.0210753903062734213,  // df = 40
    2.0195409704413760434,  // df = 41
    2.0180817028184446815,  // df = 42
    2.0166921992278243886,  // df = 43
    2.0153675744437638177,  // df = 44
    2.0141033888808466952,  // df = 45
    2.0128955989194292214,  // df = 46
    2.0117405137297658671,  // df = 47
    2.0106347576242322276,  // df = 48
    2.0095752371292396723,  // df = 49
    2.0085591121007611055,  // df = 50
    2.0075837703158360369,  // df = 51
    2.0066468050616883428,  // df = 52
    2.0057459953178689945,  // df = 53
    2.0048792881880570384,  // df = 54
    2.0040447832891458988,  // df = 55
    2.0032407188478721792,  // df = 56
    2.0024654592910073278,  // df = 57
    2.0017174841452361123,  // df = 58
    2.000995378088267706,  // df = 59
    2.0002978220142605045,  // df = 60
    1.9996235849949397004,  // df = 61
    1.9989715170333789609,  // df = 62
    1.9983405425207415782,  // df = 63
    1.9977296543176929716,  // df = 64
    1.9971379083920040771,  // df = 65
    1.9965644189523119741,  // df = 66
    1.9960083540252966725,  // df = 67
    1.99546893142984394,  // df = 68
    1.9949454151072380125,  // df = 69
    1.9944371117711865635,  // df = 70
    1.993943367845625787,  // df = 71
    1.9934635666618724102,  // df = 72
    1.9929971258898551416,  // df = 73
    1.9925434951809327016,  // df = 74
    1.9921021540022421115,  // df = 75
    1.9916726096446645018,  // df = 76
    1.9912543953883849564,  // df = 77
    1.9908470688116909263,  // df = 78
    1.9904502102301289409,  // df = 79
    1.9900634212544461674,  // df = 80
    1.9896863234569029031,  // df = 81
    1.9893185571365725499,  // df = 82
    1.988959780175162778,  // df = 83
    1.9886096669757091174,  // df = 84
    1.9882679074772219977,  // df = 85
    1.9879342062390206322,  // df = 86
    1.9876082815890711277,  // df = 87
    1.9872898648311696672,  // df = 88
    1.9869786995062814544,  // df = 89
    1.9866745407037683542,  // df = 90
    1.9863771544186181164,  // df = 91
    1.9860863169511303769,  // df = 92
    1.9858018143458234029,  // df = 93
    1.9855234418666043828,  // df = 94
    1.985251003505498163,  // df = 95
    1.9849843115224575041,  // df = 96
    1.9847231860139846848,  // df = 97
    1.9844674545084818133,  // df = 98
    1.9842169515864174951,  // df = 99
    1.9839715185235522866,  // df = 100
    1.983731002955606193,  // df = 101
    1.9834952585628797316,  // df = 102
    1.9832641447734570051,  // df = 103
    1.9830375264837259276,  // df = 104
    1.982815273795048188,  // df = 105
    1.9825972617655006221,  // df = 106
    1.9823833701756911686,  // df = 107
    1.9821734833077272261,  // df = 108
    1.9819674897364826415,  // df = 109
    1.9817652821323723129,  // df = 110
    1.9815667570749010056,  // df = 111
    1.9813718148763059131,  // df = 112
    1.9811803594146611719,  // df = 113
    1.9809922979758573295,  // df = 114
    1.9808075411039100209,  // df = 115
    1.9806260024590901233,  // df = 116
    1.9804475986834027262,  // df = 117
    1.9802722492729746192,  // df = 118
    1.9800998764569398887,  // df = 119
    1.9799304050824408467,  // df = 120
    1.9797637625053870655,  // df = 121
    1.9795998784866389449,  // df = 122
    1.9794386850933041399,  // df = 123
    1.9792801166048554762,  // df = 124
    1.979124109423797804,  // df = 125
    1.978970601990628707,  // df = 126
    1.9788195347028541999,  // df = 127
    1.9786708498378356152,  // df = 128
    1.978524491479257885,  // df = 129
    1.9783804054470224492,  // df = 130
    1.9782385392303801503,  // df = 131
    1.9780988419241307592,  // df = 132
    1.9779612641677263011,  // df = 133
    1.9778257580871251539,  // df = 134
    1.9776922772392530412,  // df = 135
    1.9775607765589355762,  // df = 136
    1.977431212308174987,  // df = 137
    1.9773035420276510972,  // df = 138
    1.9771777244903335997,  // df = 139
    1.9770537196570991678,  // df = 140
    1.9769314886342530409,  // df = 141
    1.9768109936328604211,  // df = 142
    1.9766921979297983577,  // df = 143
    1.9765750658304437997,  // df = 144
    1.9764595626329181844,  // df = 145
    1.9763456545938133322,  // df = 146
    1.9762333088953275417,  // df = 147
    1.9761224936137446541,  // df = 148
    1.9760131776891924949,  // df = 149
    1.9759053308966205192,  // df = 150
    1.9757989238179396977,  // df = 151
    1.9756939278152707054,  // df = 152
    1.9755903150052493132,  // df = 153
    1.9754880582343405598,  // df = 154
    1.9753871310551157997,  // df = 155
    1.9752875077034490931,  // df = 156
    1.9751891630765916402,  // df = 157
    1.9750920727120850678,  // df = 158
    1.9749962127674763647,  // df = 159
    1.9749015600007991321,  // df = 160
    1.9748080917517875901,  // df = 161
    1.9747157859237914434,  // df = 162
    1.9746246209663612922,  // df = 163
    1.9745345758584757615,  // df = 164
    1.9744456300923829267,  // df = 165
    1.9743577636580299502,  // df = 166
    1.9742709570280560977,  // df = 167
    1.9741851911433254937,  // df = 168
    1.9741004473989771067,  // df = 169
    1.9740167076309705149,  // df = 170
    1.97393395410310702,  // df = 171
    1.9738521694945066291,  // df = 172
    1.9737713368875223329,  // df = 173
    1.9736914397560739693,  // df = 174
    1.9736124619543847753,  // df = 175
    1.9735343877061045027,  // df = 176
    1.9734572015938037092,  // df = 177
    1.9733808885488245299,  // df = 178
    1.9733054338414738976,  // df = 179
    1.9732308230715458052,  // df = 180
    1.9731570421591598046,  // df = 181
    1.9730840773359034971,  // df = 182
    1.9730119151362673136,  // df = 183
    1.9729405423893603941,  // df = 184
    1.9728699462108968604,  // df = 185
    1.9728001139954422429,  // df = 186
    1.9727310334089102608,  // df = 187
    1.9726626923813005752,  // df = 188
    1.9725950790996685349,  // df = 189
    1.9725281820013183143,  // df = 190
    1.9724619897672112058,  // df = 191
    1.972396491315581173,  // df = 192
    1.9723316757957501039,  // df = 193
    1.9722675325821355117,  // df = 194
    1.9722040512684437347,  // df = 195
    1.9721412216620419699,  // df = 196
    1.9720790337785027474,  // df = 197
    1.972017477836314713,  // df = 198
    1.9719565442517538344,  // df = 199
    1.9718962236339093822,  // df = 200
};

// 0.975 quantile of the standard normal.
constexpr double kZ975 = 1.959963984540054;

}  // namespace

double t_critical_975(int df) {
    if (df < 1) throw Error("degrees of freedom must be >= 1");
    if (df <= static_cast<int>(kT975.size())) return kT975[static_cast<std::size_t>(df - 1)];
    // Cornish-Fisher expansion of the t quantile in powers of 1/df; the
    // first omitted term is O(df^-5), far below double precision here.
    const double z = kZ975;
    const double z2 = z * z;
    const double g1 = z * (z2 + 1.0) / 4.0;
    const double g2 = z * ((5.0 * z2 + 16.0) * z2 + 3.0) / 96.0;
    const double g3 = z * (((3.0 * z2 + 19.0) * z2 + 17.0) * z2 - 15.0) / 384.0;
    const double g4 = z * ((((79.0 * z2 + 776.0) * z2 + 1482.0) * z2 - 1920.0) * z2 - 945.0) / 92160.0;
    const double v = 1.0 / df;
    return z + v * (g1 + v * (g2 + v * (g3 + v * g4)));
}

Interval confidence_interval(const std::vector<double>& values, double level) {
    if (std::abs(level - 0.95) > 1e-12) throw Error("only 95% confidence intervals are supported");
    if (values.size() < 2) throw Error("confidence_interval needs at least two values");
    const auto n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (const double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    return {mean, t_critical_975(static_cast<int>(values.size()) - 1) * sd / std::sqrt(n)};
}

ScalingCurve scaling_curve(std::string label, const std::vector<std::vector<SearchTrace>>& runs, int k) {
    if (runs.empty()) throw Error("scaling curve needs at least one run");
    if (k < 1) throw Error("scaling curve needs k >= 1");
    ScalingCurve curve;
    curve.label = std::move(label);
    for (int j = 1; j <= k; ++j) {
        CurvePoint p;
        p.j = j;
        for (const auto& run : runs) p.per_run.push_back(pass_at_k(run, j));
        if (p.per_run.size() == 1) {
            p.mean = p.per_run.front();
        } else {
            const auto ci = confidence_interval(p.per_run);
            p.mean = ci.mean;
            p.half_width = ci.half_width;
        }
        curve.points.push_back(std::move(p));
    }
    return curve;
}

std::string curve_csv(const ScalingCurve& curve) {
    std::string out = "j,mean,ci_half_width\n";
    for (const auto& p : curve.points) out += fmt::format("{},{:.6f},{:.6f}\n", p.j, p.mean, p.half_width);
    return out;
}

nlohmann::json to_json(const ScalingCurve& curve) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : curve.points) {
        points.push_back({{"j", p.j}, {"mean", p.mean}, {"ci_half_width", p.half_width}, {"per_run", p.per_run}});
    }
    return {{"label", curve.label}, {"points", points}};
}

}  // namespace refine_search::harness
