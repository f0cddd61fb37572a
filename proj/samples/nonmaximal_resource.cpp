// Teleportation through a non-maximal resource diag(cos t, sin t). The
// entanglement entropy is below one bit, yet conjugation by the keys still
// returns every input exactly.

#include "qtel/qtel.hpp"

#include <cmath>
#include <cstdio>

int main() {
  using qtel::Matrix;

  const double theta = 3.14159265358979323846 / 3.0;
  Matrix f = Matrix::Zero(2, 2);
  f(0, 0) = std::cos(theta);
  f(1, 1) = std::sin(theta);

  std::printf("schmidt values:");
  const qtel::RealVector sv = qtel::schmidt_values(f);
  for (qtel::Index i = 0; i < sv.size(); ++i) std::printf(" %.6f", sv(i));
  std::printf("\nentanglement entropy: %.6f bits\n", qtel::entanglement_entropy(f));
  std::printf("maximally entangled: %s\n\n",
              qtel::is_maximally_entangled(f) ? "yes" : "no");

  const qtel::Protocol protocol =
      qtel::make_protocol(2, qtel::spin_basis(), qtel::PureResource{f});

  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const qtel::InputState rho = qtel::random_input_state(2, 40 + k);
    for (const qtel::OutcomeResult& r : qtel::run_protocol(protocol, rho)) {
      if (r.failed) {
        std::printf("outcome %lld failed: %s\n", static_cast<long long>(r.outcome),
                    r.failure_reason.c_str());
        return 1;
      }
      if (r.recovery_error > worst) worst = r.recovery_error;
    }
  }
  std::printf("worst recovery error over 20 random inputs: %.3g\n", worst);
  return 0;
}
