#pragma once

// Frozen reference values for tests/data/sim_small.csv, produced by the
// independent statsmodels/scipy implementations in tests/oracle/
// gen_expected.py. Regenerate only together with the dataset.

namespace expected {

inline constexpr int kRows = 200;
inline constexpr int kSumY = 75;
inline constexpr int kSumX = 100;

// log-binomial MLE (binomial family, log link); oracle score sup-norm 1.6e-7
inline constexpr double kLogbinBeta[4] = {-1.7207687627851, 0.558516883285317,
                                          0.570130071508977, 0.265698037779396};
inline constexpr double kLogbinSe[4] = {0.259502689878575, 0.191619974988096,
                                        0.302459969272175, 0.172948967435404};
inline constexpr double kLogbinLoglik = -125.31365898864;

// Poisson score solution (M = 0) with model-based and HC0 standard errors
inline constexpr double kPoisBeta[4] = {-1.69771451215091, 0.55719487285682,
                                        0.533454782844621, 0.260997661993255};
inline constexpr double kPoisModelSe[4] = {0.32487865706533, 0.240855626871019,
                                           0.404479314400598, 0.236699070759062};
inline constexpr double kPoisHc0Se[4] = {0.263962479398392, 0.192822227145949,
                                         0.303979901621418, 0.179950516347656};

// weighted estimating equation at M = 20
inline constexpr double kEeM20Beta[4] = {-1.72070934974996, 0.558501763745779,
                                         0.570056816065285, 0.265661475014283};

// logistic regression of x on (1, z1, z2)
inline constexpr double kPropGamma[3] = {-0.291261909620129, 0.497180651708511,
                                         0.0766694449487123};

// binary regression model, target (1, z1), nuisance (1, z1, z2)
inline constexpr double kBrmMleAlpha[2] = {0.338395104821983, 0.364170338876107};
inline constexpr double kBrmMleEta[3] = {-2.36680038361673, 1.7532131580927,
                                         0.898036096216215};
inline constexpr double kBrmMleLoglik = -125.257929290585;
inline constexpr double kBrmDrAlpha[2] = {0.342628156634185, 0.373080922562954};

// Mantel-Haenszel over strata (12,18,8,22) and (20,10,14,16)
inline constexpr double kMhRr = 1.45454545454545;
inline constexpr double kMhLo = 0.977609112191639;
inline constexpr double kMhHi = 2.16415994179492;

// Katz / Woolf intervals for the table (1,5,1,11)
inline constexpr double kKatzLo = 0.149622255124004;
inline constexpr double kKatzHi = 26.7339908537328;
inline constexpr double kWoolfLo = 0.11325707946935;
inline constexpr double kWoolfHi = 42.7346354212657;

}  // namespace expected
