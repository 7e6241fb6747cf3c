#pragma once

#include <Eigen/Dense>
#include <complex>

#include "timebin/config.hpp"

namespace timebin {

/// Two-photon density operator over the ordered path basis
/// { |s_A s_B>, |s_A l_B>, |l_A s_B>, |l_A l_B> }.
struct TwoPhotonPathState {
  Eigen::Matrix4cd rho;

  /// Coherence between the ss and ll alternatives (the entangling term).
  std::complex<double> ss_ll_coherence() const { return rho(0, 3); }

  /// Hermiticity (1e-12), unit trace (1e-12) and positivity (eigenvalues
  /// >= -1e-10). Throws DataError naming the violated property.
  void validate() const;
};

/// Path state after the first splitter passage, before any detection
/// post-selection. Pump phase diffusion over the imbalance delay damps the
/// coherences: the state interpolates between the pure equal-superposition
/// product state (pump_dephasing -> 1) and the fully dephased uniform
/// mixture (pump_dephasing -> 0). The diagonal is (1/4, 1/4, 1/4, 1/4) and
/// the ss <-> ll element is pump_dephasing / 4.
TwoPhotonPathState prepare_state(const InterferometerConfig& config);

}  // namespace timebin
