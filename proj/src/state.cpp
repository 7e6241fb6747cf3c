#include "timebin/state.hpp"

#include <sstream>

#include "timebin/errors.hpp"

namespace timebin {

void TwoPhotonPathState::validate() const {
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (!(herm <= 1e-12)) {
    std::ostringstream os;
    os << "density matrix is not Hermitian (max |rho - rho^+| = " << herm << ")";
    throw DataError(os.str());
  }
  const double trace_dev = std::abs(rho.trace() - std::complex<double>(1.0, 0.0));
  if (!(trace_dev <= 1e-12)) {
    std::ostringstream os;
    os << "density matrix trace deviates from 1 by " << trace_dev;
    throw DataError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (!(min_eig >= -1e-10)) {
    std::ostringstream os;
    os << "density matrix is not positive semidefinite (min eigenvalue = " << min_eig << ")";
    throw DataError(os.str());
  }
}

TwoPhotonPathState prepare_state(const InterferometerConfig& config) {
  config.validate();
  const double mu = config.pump_dephasing();
  TwoPhotonPathState state;
  // mu * |Psi0><Psi0| + (1 - mu) * (uniform path mixture), where |Psi0> is
  // the equal superposition of the four path alternatives.
  state.rho = Eigen::Matrix4cd::Constant(std::complex<double>(0.25 * mu, 0.0));
  for (int k = 0; k < 4; ++k) state.rho(k, k) = 0.25;
  return state;
}

}  // namespace timebin
