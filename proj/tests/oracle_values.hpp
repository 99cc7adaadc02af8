#pragma once

#include <cstddef>

// Reference values frozen from an independent 50-digit evaluation of the
// defining integrals and gamma-function expressions. Fields left at zero are
// not pinned for that row.
namespace oracle {

struct HurstRow {
  double H;
  double lambda;
  double d;
  double eta;
  double c_kb;
  double kappa;    // H < 1/2 rows only
  double beta_nl;  // H > 1/2 rows only
  double mu_mass;  // H < 1/2 rows only
};

inline constexpr HurstRow kHurst[] = {
    {0.25, 0.89860517605169416, 1.2919960074815039, 1.0227656721131687,
     0.55536036726979578, 0.34842070368007499, 0.0, 3.7081493546027438},
    {0.3, 0.94503573922860584, 1.2171382234665383, 1.0348317200442789,
     0.64137559926935707, 0.25619913601493474, 0.0, 4.7507506949421837},
    {0.4, 0.99010190824600437, 1.1009071042046586, 1.0361393564546608,
     0.81331259077044157, 0.11168422377859059, 0.0, 9.8573197445250808},
    {0.49, 0.99992654805739564, 1.0099875872925134, 1.0055434899749620,
     0.98016122210232646, 0.010101513463825671, 0.0, 99.983788657943169},
    {0.6, 0.99500153698618842, 0.89667098677650599, 0.91788475205629325,
     1.2199688861556624, 0.0, 0.091415139777149461, 0.0},
    {0.7, 0.98653813492128811, 0.77986366491708042, 0.7817860418313528,
     1.4965430649618332, 0.0, 0.17136498630145742, 0.0},
    {0.75, 0.98327158285954493, 0.71309642335466022, 0.69136733903629335,
     1.6660811018093873, 0.0, 0.21042416487466885, 0.0},
};
inline constexpr std::size_t kHurstCount = sizeof(kHurst) / sizeof(kHurst[0]);

// T(a,b,x) = int_x^1 v^a (1-v)^b dv
struct TailPin {
  double a, b, x, value;
};
inline constexpr TailPin kBetaTail[] = {
    {-1.4, -0.8, 0.01, 18.625645794764800},
    {-1.4, -0.8, 0.3, 6.2554129040409637},
    {-1.4, -0.8, 0.9, 3.2336265304408020},
    {-0.6, -0.2, 0.01, 2.4161558587491101},
    {-0.6, -0.2, 0.55, 0.76528269564490664},
    {-1.0, 0.2, 0.02, 3.6278633664793655},
    {-1.0, 0.2, 0.5, 0.5177396505565745},
    {-1.0, 0.2, 0.95, 0.023533168210636744},
    {-1.0, -0.2, 0.25, 1.7197960505277343},
    {0.2, -0.8, 0.001, 4.7505412796750099},
    {0.2, -0.8, 0.6, 4.1013910840811995},
    {0.3, -0.7, 0.45, 2.6648155935543153},
};

// Hd(a,b,x) = int_0^x v^a (1-v)^b dv
struct HeadPin {
  double a, b, x, value;
};
inline constexpr HeadPin kBetaHead[] = {
    {-0.2, -1.2, 0.4, 0.78212715200712755},
    {-0.2, -1.2, 0.92, 3.7013627255684628},
    {0.8, -1.2, 0.7, 0.68065731116622065},
    {-0.3, -1.3, 0.985, 9.1955616384192195},
};

// g(x) = int_x^1 (1-u)^{1/2-H} u^{-1} du at x in {0.02, 0.5, 0.95}
inline constexpr double kProfileX[3] = {0.02, 0.5, 0.95};
inline constexpr double kProfile03[3] = {3.6278633664793655, 0.5177396505565745,
                                         0.023533168210636744};
inline constexpr double kProfile07[3] = {4.2957916697116828, 0.96058583601947516,
                                         0.11639821726843207};

// moving-average kernel K(t,s)
struct KernelPin {
  double H, t, s, value;
};
inline constexpr KernelPin kKernel[] = {
    {0.3, 1.0, 0.25, 0.84720415049433005},
    {0.3, 1.0, 0.7, 0.94711259300007112},
    {0.3, 2.0, 1.7, 0.93695084029852144},
    {0.7, 1.0, 0.25, 1.1006597955681281},
    {0.7, 1.0, 0.7, 0.86944433838284615},
    {0.7, 2.0, 0.6, 1.2332835802956348},
    {0.25, 1.0, 0.5, 0.82032262376475282},
    {0.75, 1.0, 0.5, 0.93759196369805723},
};

// inverse-transfer row weight w_t(u)
struct WeightPin {
  double H, t, u, value;
};
inline constexpr WeightPin kRowWeight[] = {
    {0.3, 1.0, 0.1, 1.1203313574310945},
    {0.3, 1.0, 0.5, 1.0862868886283016},
    {0.3, 1.0, 0.9, 0.80536324255843228},
    {0.7, 1.0, 0.1, 0.66180462416968869},
    {0.7, 1.0, 0.5, 0.94149914464326854},
    {0.7, 1.0, 0.9, 1.3505746698934281},
    {0.3, 2.0, 1.3, 1.1743859276766731},
    {0.7, 2.0, 1.3, 0.89738825030717807},
};

// int_0^t w_t(u) du
struct RowIntegralPin {
  double H, t, value;
};
inline constexpr RowIntegralPin kRowIntegral[] = {
    {0.3, 1.0, 1.0142818528887819},
    {0.3, 400.0, 1344.7162248089076},
    {0.7, 1.0, 0.97482958114635052},
    {0.7, 400.0, 117.64587181435082},
};

// Q_t for the deterministic drift sample g(u) = u + 0.3 u^2 on [0, t]
struct QPin {
  double H, t, value;
};
inline constexpr QPin kQDeterministic[] = {
    {0.25, 0.5, 0.51379312946962692},
    {0.25, 1.0, 1.3673624412512583},
    {0.3, 0.5, 0.51654542844841887},
    {0.3, 1.0, 1.3301582013598597},
    {0.49, 0.5, 0.57070839543763839},
    {0.49, 1.0, 1.2986261967981679},
    {0.7, 0.5, 0.6979994016053463},
    {0.7, 1.0, 1.3907568691021267},
};

// 4-point Jacobi rule on [0,1] for the weight r^{0.2} (1-r)^{-0.8}
inline constexpr double kJacobiNodes[4] = {
    0.10076695916758893, 0.41101525985141113, 0.77086031471783767,
    0.98762773653343261};
inline constexpr double kJacobiWeights[4] = {
    0.15340353692417774, 0.47102739205985467, 0.97917518480631394,
    3.1471445811518395};
inline constexpr double kJacobiMass = 4.7507506949421837;

}  // namespace oracle
