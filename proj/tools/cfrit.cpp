// Command-line front end: key generation, simulation, plaintext and
// confidential tuning, and verification of the resulting gains.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "cfrit/confidential.hpp"
#include "cfrit/error.hpp"
#include "cfrit/frit.hpp"
#include "cfrit/plant.hpp"
#include "cfrit/profiles.hpp"
#include "cfrit/random.hpp"
#include "cfrit/serialize.hpp"
#include "cfrit/setups.hpp"
#include "cfrit/wire.hpp"

namespace fs = std::filesystem;
using namespace cfrit;

namespace {

enum Exit { kOk = 0, kUsage = 2, kCrypto = 3, kNetwork = 4, kThreshold = 5 };

int exit_code_for(const std::string& code) {
  if (code == "invalid_argument" || code == "dimension" || code == "usage") return kUsage;
  if (code == "network" || code == "timeout" || code == "protocol" || code == "bad_frame" ||
      code == "frame_too_large" || code == "unsupported_scheme" || code == "unexpected_message")
    return kNetwork;
  return kCrypto;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

struct Options {
  std::optional<std::uint64_t> seed;
  // keygen
  std::string scheme, profile = "test", out;
  // simulate
  int example = 1;
  std::string hd_out;
  // prepare / frit
  std::string log, hd, keys, data, result;
  std::optional<double> sensitivity;
  std::optional<int> level;
  // serve / tune
  std::uint16_t port = wire::kDefaultPort;
  std::string bind = "127.0.0.1";
  std::string remote;
  int repeat = 1;
  double timeout_s = 600.0;
  std::size_t max_frame = wire::kDefaultMaxFrame;
  // verify
  std::string gain, baseline, plant, csv;
  std::size_t steps = 0;
  std::optional<double> max_gain_diff, max_pole_distance, max_deviation;
};

Json read_key(const std::string& dir, const char* file) { return read_json_file(fs::path(dir) / file); }

std::string key_scheme(const Json& pub) {
  return pub.contains("scheme") ? pub["scheme"].get<std::string>() : "";
}

void require_scheme(const std::string& expected, const std::string& actual, const std::string& what) {
  if (expected != actual)
    throw InvalidArgument(what + " is for scheme '" + actual + "', not '" + expected + "'");
}

std::string format_poles(const std::vector<std::complex<double>>& poles) {
  std::ostringstream out;
  out << std::setprecision(10);
  for (std::size_t i = 0; i < poles.size(); ++i) {
    if (i) out << ' ';
    out << poles[i].real() << (poles[i].imag() < 0 ? "-" : "+") << std::abs(poles[i].imag()) << 'j';
  }
  return out.str();
}

int cmd_keygen(const Options& o) {
  RandomHandle rng(o.seed);
  fs::create_directories(o.out);
  if (o.scheme == "elgamal") {
    const auto profile = elgamal_profile(o.profile);
    const auto keys = make_elgamal_keys(profile, rng.get());
    Json pub = to_json(keys.pk);
    pub["profile"] = profile.name;
    pub["sensitivity"] = profile.sensitivity;
    write_json_file(fs::path(o.out) / "public.json", pub);
    write_json_file(fs::path(o.out) / "secret.json", to_json(keys.sk));
  } else {
    const auto keys = ckks::Keys::generate(ckks_profile(o.profile), rng.get());
    Json pub = to_json(keys.pub);
    pub["profile"] = o.profile;
    pub["sensitivity"] = keys.pub.params.gamma();
    write_json_file(fs::path(o.out) / "public.json", pub);
    write_json_file(fs::path(o.out) / "secret.json", to_json(keys.secret));
  }
  std::cout << "keys written to " << o.out << '\n';
  return kOk;
}

int cmd_simulate(const Options& o) {
  const ExampleSetup setup = example_by_id(o.example);
  LogDocument doc{setup.name, setup.plant, setup.F_ini, setup.simulate(), setup.window_start, setup.N};
  write_json_file(o.out, log_to_json(doc));
  if (!o.hd_out.empty()) write_json_file(o.hd_out, hd_to_json(setup.hd));
  std::cout << setup.name << ": " << doc.log.steps() << " steps written to " << o.out << '\n';
  return kOk;
}

FritData load_frit_data(const Options& o) {
  const LogDocument doc = log_from_json(read_json_file(o.log));
  const DesiredClosedLoop hd = hd_from_json(read_json_file(o.hd));
  return make_frit_data(doc.log, hd, doc.window_start, doc.N);
}

int cmd_frit(const Options& o) {
  const GainVector F = frit_gain(load_frit_data(o));
  write_json_file(o.out, gain_to_json(F));
  std::cout << std::setprecision(12) << "F = [" << F << "]\n";
  return kOk;
}

int cmd_prepare(const Options& o) {
  const FritData data = load_frit_data(o);
  const Json pub = read_key(o.keys, "public.json");
  require_scheme(o.scheme, key_scheme(pub), "key directory " + o.keys);
  RandomHandle rng(o.seed);
  EncryptedDatasetD d;
  if (o.scheme == "elgamal") {
    const double gamma = o.sensitivity.value_or(pub.value("sensitivity", std::ldexp(1.0, -40)));
    d = client_prepare_elgamal(data, elgamal_public_from_json(pub), gamma, rng.get());
  } else {
    d = client_prepare_ckks(data, ckks_public_from_json(pub), rng.get(), o.level);
  }
  write_json_file(o.out, to_json(d));
  std::cout << "dataset D (" << o.scheme << ", n=" << data.n << ", N=" << data.N << ") written to "
            << o.out << '\n';
  return kOk;
}

volatile std::sig_atomic_t g_stop = 0;

int cmd_serve(const Options& o) {
  wire::ServerOptions so;
  so.bind_address = o.bind;
  so.port = o.port;
  so.max_frame = o.max_frame;
  wire::TuneServer server(so);
  server.start();
  std::cout << "listening on " << o.bind << ':' << server.port() << std::endl;
  std::signal(SIGINT, [](int) { g_stop = 1; });
  std::signal(SIGTERM, [](int) { g_stop = 1; });
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  return kOk;
}

int cmd_tune(const Options& o) {
  const EncryptedDatasetD d = dataset_d_from_json(read_json_file(o.data));
  std::optional<EncryptedDatasetF> f;
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, o.repeat); ++r) {
    if (o.remote.empty()) {
      const auto t0 = std::chrono::steady_clock::now();
      f = server_tune(d);
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    } else {
      const auto [host, port] = wire::parse_address(o.remote);
      wire::ClientOptions co;
      co.timeout = std::chrono::milliseconds(static_cast<long long>(o.timeout_s * 1000));
      co.max_frame = o.max_frame;
      auto res = wire::request_tune_detailed(host, port, d, co);
      best = std::min(best, res.server_seconds);
      f = std::move(res.result);
    }
  }
  write_json_file(o.out, to_json(*f));
  std::cout << "server_seconds=" << std::setprecision(6) << best << '\n';
  return kOk;
}

int cmd_finalize(const Options& o) {
  const EncryptedDatasetF f = dataset_f_from_json(read_json_file(o.result));
  require_scheme(o.scheme, scheme_name(f), "result " + o.result);
  const Json pub = read_key(o.keys, "public.json");
  const Json sec = read_key(o.keys, "secret.json");
  require_scheme(o.scheme, key_scheme(pub), "key directory " + o.keys);
  GainVector F;
  if (o.scheme == "elgamal") {
    const double gamma = o.sensitivity.value_or(pub.value("sensitivity", std::ldexp(1.0, -40)));
    F = client_finalize_elgamal(std::get<ElGamalDatasetF>(f), elgamal_public_from_json(pub),
                                elgamal_secret_from_json(sec), gamma);
  } else {
    const ckks::Params params = ckks_params_from_json(pub.at("params"));
    F = client_finalize_ckks(std::get<CkksDatasetF>(f), ckks_secret_from_json(sec),
                             o.sensitivity.value_or(params.gamma()));
  }
  write_json_file(o.out, gain_to_json(F));
  std::cout << std::setprecision(12) << "F = [" << F << "]\n";
  return kOk;
}

int cmd_verify(const Options& o) {
  const GainVector F = gain_from_json(read_json_file(o.gain));
  const GainVector B = gain_from_json(read_json_file(o.baseline));
  const Json plant_doc = read_json_file(o.plant);
  const PlantModel plant = plant_from_json(plant_doc);
  if (F.size() != B.size() || static_cast<std::size_t>(F.size()) != plant.order())
    throw DimensionError("gain, baseline and plant dimensions differ");
  Vector v;
  if (o.steps > 0)
    v = excitation_pulse(o.steps);
  else if (plant_doc.contains("v"))
    v = log_from_json(plant_doc).log.v;
  else
    v = excitation_pulse(50);

  const double gain_diff = (F - B).norm();
  const auto poles_f = closed_loop_poles(plant, F);
  const auto poles_b = closed_loop_poles(plant, B);
  const double pole_dist = pole_distance(poles_f, poles_b);
  const SignalLog xf = simulate_closed_loop(plant, F, v);
  const SignalLog xb = simulate_closed_loop(plant, B, v);
  const Matrix dev = xb.x - xf.x;
  const double max_dev = dev.size() ? dev.cwiseAbs().maxCoeff() : 0.0;

  std::ostringstream csv;
  csv << std::setprecision(10) << "step";
  for (Eigen::Index c = 0; c < dev.cols(); ++c) csv << ",dx" << c + 1;
  csv << '\n';
  for (Eigen::Index k = 0; k < dev.rows(); ++k) {
    csv << k;
    for (Eigen::Index c = 0; c < dev.cols(); ++c) csv << ',' << dev(k, c);
    csv << '\n';
  }

  std::cout << std::setprecision(10) << "gain_diff_norm=" << gain_diff << '\n'
            << "poles_gain=" << format_poles(poles_f) << '\n'
            << "poles_baseline=" << format_poles(poles_b) << '\n'
            << "pole_distance=" << pole_dist << '\n'
            << "max_trajectory_deviation=" << max_dev << '\n';
  if (o.csv.empty()) {
    std::cout << '\n' << csv.str();
  } else {
    std::ofstream out(o.csv);
    if (!out) throw InvalidArgument("cannot write '" + o.csv + "'");
    out << csv.str();
  }

  bool ok = true;
  auto check = [&](const std::optional<double>& limit, double value, const char* name) {
    if (limit && !(value <= *limit)) {
      std::cerr << "cfrit: threshold exceeded: " << name << '=' << value << " > " << *limit << '\n';
      ok = false;
    }
  };
  check(o.max_gain_diff, gain_diff, "gain_diff_norm");
  check(o.max_pole_distance, pole_dist, "pole_distance");
  check(o.max_deviation, max_dev, "max_trajectory_deviation");
  return ok ? kOk : kThreshold;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidential state-feedback gain tuning over homomorphically encrypted data"};
  app.require_subcommand(1);
  Options o;
  const std::vector<std::string> schemes{"elgamal", "ckks"};
  const std::vector<std::string> profiles{"test", "secure128"};
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Deterministic randomness seed");
  };

  auto* keygen = app.add_subcommand("keygen", "Generate a key pair into a directory");
  keygen->add_option("--scheme", o.scheme)->required()->check(CLI::IsMember(schemes));
  keygen->add_option("--profile", o.profile)->check(CLI::IsMember(profiles));
  keygen->add_option("--out", o.out, "Key directory")->required();
  add_seed(keygen);

  auto* simulate = app.add_subcommand("simulate", "Run a built-in example and record the log");
  simulate->add_option("--example", o.example)->required()->check(CLI::Range(1, 2));
  simulate->add_option("--out", o.out)->required();
  simulate->add_option("--hd-out", o.hd_out, "Also write the reference model");
  add_seed(simulate);

  auto* prepare = app.add_subcommand("prepare", "Encrypt the regression data into dataset D");
  prepare->add_option("--scheme", o.scheme)->required()->check(CLI::IsMember(schemes));
  prepare->add_option("--log", o.log)->required();
  prepare->add_option("--hd", o.hd)->required();
  prepare->add_option("--keys", o.keys)->required();
  prepare->add_option("--out", o.out)->required();
  prepare->add_option("--sensitivity", o.sensitivity, "ElGamal gamma_e (default: key profile)");
  prepare->add_option("--level", o.level, "CKKS level of the dataset (default: required depth)");
  add_seed(prepare);

  auto* serve = app.add_subcommand("serve", "Run the tuning server");
  serve->add_option("--port", o.port);
  serve->add_option("--bind", o.bind);
  serve->add_option("--max-frame", o.max_frame);
  add_seed(serve);

  auto* tune = app.add_subcommand("tune", "Compute the encrypted gain from dataset D");
  tune->add_option("--data", o.data)->required();
  tune->add_option("--out", o.out)->required();
  tune->add_option("--remote", o.remote, "HOST:PORT of a tuning server");
  tune->add_option("--repeat", o.repeat, "Repetitions; the minimum server time is printed");
  tune->add_option("--timeout", o.timeout_s, "Network timeout in seconds");
  tune->add_option("--max-frame", o.max_frame);
  add_seed(tune);

  auto* finalize = app.add_subcommand("finalize", "Decrypt and decode the tuned gain");
  finalize->add_option("--scheme", o.scheme)->required()->check(CLI::IsMember(schemes));
  finalize->add_option("--result", o.result)->required();
  finalize->add_option("--keys", o.keys)->required();
  finalize->add_option("--out", o.out)->required();
  finalize->add_option("--sensitivity", o.sensitivity);
  add_seed(finalize);

  auto* frit = app.add_subcommand("frit", "Plaintext baseline gain");
  frit->add_option("--log", o.log)->required();
  frit->add_option("--hd", o.hd)->required();
  frit->add_option("--out", o.out)->required();
  add_seed(frit);

  auto* verify = app.add_subcommand("verify", "Compare a gain against a baseline");
  verify->add_option("--gain", o.gain)->required();
  verify->add_option("--baseline", o.baseline)->required();
  verify->add_option("--plant", o.plant, "Plant or log document")->required();
  verify->add_option("--csv", o.csv, "Write the trajectory deviations here instead of stdout");
  verify->add_option("--steps", o.steps, "Pulse length for the trajectories (default: log's v)");
  verify->add_option("--max-gain-diff", o.max_gain_diff);
  verify->add_option("--max-pole-distance", o.max_pole_distance);
  verify->add_option("--max-deviation", o.max_deviation);
  add_seed(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "cfrit: error code=usage: " << one_line(e.what()) << '\n';
    return kUsage;
  }

  try {
    if (*keygen) return cmd_keygen(o);
    if (*simulate) return cmd_simulate(o);
    if (*prepare) return cmd_prepare(o);
    if (*serve) return cmd_serve(o);
    if (*tune) return cmd_tune(o);
    if (*finalize) return cmd_finalize(o);
    if (*frit) return cmd_frit(o);
    if (*verify) return cmd_verify(o);
  } catch (const RemoteError& e) {
    std::cerr << "cfrit: error code=remote:" << e.code() << ": " << one_line(e.what()) << '\n';
    return kNetwork;
  } catch (const Error& e) {
    std::cerr << "cfrit: error code=" << e.code() << ": " << one_line(e.what()) << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "cfrit: error code=internal: " << one_line(e.what()) << '\n';
    return kCrypto;
  }
  return kUsage;
}
