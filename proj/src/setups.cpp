#include "cfrit/setups.hpp"

#include <string>

#include "cfrit/error.hpp"

namespace cfrit {

ExampleSetup example1() {
  ExampleSetup s;
  s.name = "example1";
  s.plant.A = Matrix{{1.0, 1.0}, {0.0, -2.0}};
  s.plant.B = Vector{{0.0, 1.0}};
  s.plant.sampling_period = 0.01;
  s.F_ini = GainVector{{-0.8, 2.0}};
  // H_d1 = 1 / (z^2 - 0.5 z), H_d2 = (z - 1) / (z^2 - 0.5 z).
  s.hd.components = {{{1.0}, {1.0, -0.5, 0.0}}, {{1.0, -1.0}, {1.0, -0.5, 0.0}}};
  s.window_start = 0;
  s.N = 50;
  s.steps = 50;
  return s;
}

ExampleSetup example2() {
  ExampleSetup s;
  s.name = "example2";
  s.plant.A = Matrix{{0.9054, 0.6895, 0.2246}, {-0.2246, 0.2317, 0.2403}, {-0.2403, -0.9455, -0.2489}};
  s.plant.B = Vector{{0.0946, 0.2246, 0.2403}};
  s.plant.sampling_period = 1.0;
  s.F_ini = GainVector{{0.12, -2.37, -0.82}};
  const std::vector<double> den{1.0, -0.9803, 0.4318, -0.1753};
  s.hd.components = {{{0.0946, 0.2105, 0.0342}, den},
                     {{0.2246, -0.1109, -0.1137}, den},
                     {{0.2403, -0.5083, 0.2680}, den}};
  s.window_start = 0;
  s.N = 30;
  s.steps = 30;
  return s;
}

ExampleSetup example_by_id(int id) {
  if (id == 1) return example1();
  if (id == 2) return example2();
  throw InvalidArgument("unknown example " + std::to_string(id) + " (expected 1 or 2)");
}

}  // namespace cfrit
