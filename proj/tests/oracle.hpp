#pragma once

// Reference values and a deliberately naive long-double rescorer, kept
// independent of the library implementation so the two can disagree.
// The named constants were evaluated once with 30-digit arithmetic and
// frozen here; tests compare the library against these digits, not
// against any rounded presentation elsewhere.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "aas/kernel.hpp"

namespace oracle {

// phi_0.01 at landmark points.
inline constexpr double kPhi0 = 6.65821148275179473717;
inline constexpr double kPhiHalf = 0.98578614078029914746;
inline constexpr double kPhi02 = 2.26589405997303444828;
inline constexpr double kPhi04 = 1.30065947813371104401;
inline constexpr double kPhi055 = 0.85085656069419062973;
inline constexpr double kPhi08 = 0.31836147986717001136;
inline constexpr double kPhi09 = 0.15041684255309846933;
inline constexpr double kPhi099 = 0.01435529297707004143;

// Composite landmarks.
inline constexpr double kPointFourPhiHalf = 0.39431445631211965899;  // 0.4*phi(0.5)
inline constexpr double kRateCapLx01 = 14.42695040888963407360;  // 0.1/(0.01 ln2)
inline constexpr double kGuaranteedDrop = 0.32516486953342776100;  // 0.25*phi(0.4)
inline constexpr double kActualDrop = 0.44980291743952041428;  // phi(0.4)-phi(0.55)
inline constexpr double kJensenSum = 1.29212776992010222982;  // .5 phi(.2)+.5 phi(.8)
inline constexpr double kJensenGap = 0.30634162913980308235;  // sum - phi(0.5)
inline constexpr double kTwoPhiHalf = 1.97157228156059829493;
inline constexpr double kHalfPhi08 = 0.15918073993358500568;
inline constexpr double kPhi099Linearized = 0.01428410931573231096;  // 0.01/(1.01 ln2)
inline constexpr double kPsrTerm = 5.09223208539821142034;  // phi(0.01/0.51)
inline constexpr double kOrderHalf = 0.85194430316099237808;  // 1 - phi(.5)/phi(0)
inline constexpr double kEntropy631 = 1.29546184423832178456;  // H(0.6,0.3,0.1)
inline constexpr double kKlPq = 0.53100440641071877875;  // D((.9,.1)||(.5,.5))
inline constexpr double kKlPr = 0.05293250129808112662;  // D((.9,.1)||(.8,.2))
inline constexpr double kReasonExample = 0.47807190511263765213;  // kKlPq - kKlPr

// Boundary harness landmarks (x0=0.5, 200 steps, eps=0.01).
inline constexpr double kBenevolentFinal = 5.0387760618e-10;  // phi(1-0.5*0.9^200)
inline constexpr double kDegradationFinal = 6.65821143186015741910;  // phi(0.5*0.9^200)
inline constexpr double kDegradationGap = 5.0891637318e-8;  // kPhi0 - final

inline long double phi(long double x, long double eps) {
  return std::log2((1.0L + eps) / (x + eps));
}

struct Score {
  std::vector<double> contributions;
  std::vector<double> shares;
  double total = 0.0;
  double peak_share = 0.0;
  double entropy = 0.0;
  double kappa = 0.0;
  double apper = 0.0;
  int active = 0;
};

// Straight-line rescore in long double; no shared code with the library.
inline Score rescore(const aas::SessionSnapshot& snap, double eps) {
  const std::size_t m = snap.channels.size();
  Score out;
  out.contributions.resize(m);
  out.shares.assign(m, 0.0);
  long double total = 0.0L;
  for (std::size_t i = 0; i < m; ++i) {
    const long double alpha =
        static_cast<long double>(snap.weights[i]) * (1.0L - snap.channels[i].R);
    const long double c = alpha * phi(snap.channels[i].x, eps);
    out.contributions[i] = static_cast<double>(c);
    total += c;
  }
  out.total = static_cast<double>(total);
  if (total > 0.0L) {
    long double h = 0.0L;
    long double peak = 0.0L;
    for (std::size_t i = 0; i < m; ++i) {
      const long double p = out.contributions[i] / total;
      out.shares[i] = static_cast<double>(p);
      peak = std::max(peak, p);
      if (p > 0.0L) {
        h -= p * std::log2(p);
        ++out.active;
      }
    }
    out.peak_share = static_cast<double>(peak);
    out.entropy = static_cast<double>(h);
    out.kappa = out.active >= 2
                    ? static_cast<double>(
                          h / std::log2(static_cast<long double>(out.active)))
                    : 0.0;
    out.apper = (1.0 - out.kappa) * out.peak_share;
  }
  return out;
}

}  // namespace oracle
