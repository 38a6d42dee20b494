#pragma once

#include <cstddef>
#include <string>

#include "cfrit/frit.hpp"
#include "cfrit/plant.hpp"

namespace cfrit {

/// A complete tuning experiment: plant, initial gain, excitation, reference
/// model and regression window.
struct ExampleSetup {
  std::string name;
  PlantModel plant;
  GainVector F_ini;
  DesiredClosedLoop hd;
  std::size_t window_start = 0;
  std::size_t N = 0;
  /// Steps to simulate; the window [window_start, window_start + N) must fit.
  std::size_t steps = 0;

  Vector excitation() const { return excitation_pulse(steps); }
  SignalLog simulate() const { return simulate_closed_loop(plant, F_ini, excitation()); }
};

/// Unstable 2nd-order plant, 10 ms sampling, N = 50.
ExampleSetup example1();
/// 3rd-order plant, 1 s sampling, N = 30.
ExampleSetup example2();
/// 1 or 2; InvalidArgument otherwise.
ExampleSetup example_by_id(int id);

}  // namespace cfrit
