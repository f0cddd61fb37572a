// The classic scheme as a special case: resource I/sqrt(2), spin measurement
// basis. Every outcome is equally likely and the keys are the spin unitaries.

#include "qtel/qtel.hpp"

#include <cmath>
#include <cstdio>

int main() {
  using qtel::Matrix;

  const Matrix f = Matrix::Identity(2, 2) / std::sqrt(2.0);
  const qtel::Protocol protocol =
      qtel::make_protocol(2, qtel::spin_basis(), qtel::PureResource{f});

  std::printf("maximally entangled: %s\n",
              qtel::is_maximally_entangled(f) ? "yes" : "no");
  std::printf("entanglement entropy: %.6f bits\n\n", qtel::entanglement_entropy(f));

  const qtel::InputState rho = qtel::random_input_state(2, 7);
  std::printf("outcome  probability  recovery error\n");
  for (const qtel::OutcomeResult& r : qtel::run_protocol(protocol, rho)) {
    std::printf("%7lld  %11.6f  %14.3g\n", static_cast<long long>(r.outcome),
                r.probability, r.recovery_error);
  }
  return 0;
}
