// Copyright 2026 The hbsa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// hbsa: command-line front end. Exit status 0 on success, 1 on a
// simulation or verification failure, 2 on a usage error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "hbsa/hbsa.hpp"
#include "hbsa/report.hpp"

namespace {

using namespace hbsa;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string input;
  std::string circuit = "builtin:fig2";
  std::string impl;  // empty: command default
  std::string format = "text";
  std::uint64_t seed = kDefaultOracleSeed;
  std::size_t count = 50;
  int lmax = 0;  // 0: keep the circuit's own
  std::string tamper;
};

/// Thrown for problems with the user's arguments or documents.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

BellLabel input_label(const Options& o) {
  if (auto b = parse_bell_label(o.input)) return *b;
  throw UsageError("--input must be one of phi+, phi-, psi+, psi-");
}

std::optional<Impl> impl_flag(const Options& o) {
  if (o.impl.empty()) return std::nullopt;
  return o.impl == "decomposed" ? Impl::Decomposed : Impl::Canonical;
}

int lmax_or_default(const Options& o) { return o.lmax > 0 ? o.lmax : kDefaultLmax; }

bool json(const Options& o) { return o.format == "json"; }

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

Circuit load(const Options& o) {
  Circuit c;
  try {
    c = load_circuit(o.circuit);
  } catch (const Error& e) {
    throw UsageError(o.circuit + ": " + e.what());
  }
  if (auto impl = impl_flag(o)) c = with_impl(std::move(c), *impl);
  if (o.lmax > 0) c = with_lmax(std::move(c), o.lmax);
  return c;
}

int cmd_run(const Options& o) {
  const BellLabel label = input_label(o);
  const Circuit circuit = load(o);
  const Impl impl = impl_flag(o).value_or(Impl::Canonical);
  const CompiledCircuit c = compile(circuit);
  const TwoPhotonState out = propagate(c, prepare_input(label, c.space));
  const OutcomeDistribution d = measure(c, out, sppm_method(impl));
  if (json(o)) {
    Json j{{"schema_version", kSchemaVersion},
           {"circuit", circuit.name},
           {"input", to_string(label)},
           {"impl", to_string(impl)}};
    j.update(to_json(d));
    emit(j);
  } else {
    std::cout << to_text(d);
  }
  return kExitOk;
}

int cmd_verify(const Options& o) {
  std::vector<Impl> modes;
  if (auto impl = impl_flag(o))
    modes.push_back(*impl);
  else
    modes = {Impl::Canonical, Impl::Decomposed};

  std::optional<ClassificationTable> tampered;
  if (!o.tamper.empty()) {
    CoincidencePattern p;
    try {
      p = parse_pattern(o.tamper);
      const BellLabel was = detector_table().classify(p);
      const BellLabel to = kBellLabels[(static_cast<std::size_t>(was) + 1) % kBellLabels.size()];
      tampered = detector_table().relabeled(p, to);
    } catch (const Error& e) {
      throw UsageError(std::string("--tamper-pattern: ") + e.what());
    }
  }

  bool all_pass = true;
  Json reports = Json::array();
  for (Impl impl : modes) {
    const VerificationReport r = verify(impl, tampered ? &*tampered : nullptr, lmax_or_default(o));
    all_pass = all_pass && r.pass();
    if (json(o)) {
      reports.push_back(to_json(r));
    } else {
      std::cout << to_text(r);
    }
    for (const auto& f : r.failures()) std::cerr << "hbsa: " << to_string(impl) << " check failed: " << f << "\n";
  }
  if (json(o)) emit(Json{{"schema_version", kSchemaVersion}, {"pass", all_pass}, {"reports", reports}});
  return all_pass ? kExitOk : kExitFailure;
}

int cmd_stages(const Options& o) {
  const BellLabel label = input_label(o);
  const Impl impl = impl_flag(o).value_or(Impl::Canonical);
  const auto snaps = stage_states(label, impl, lmax_or_default(o));
  if (json(o))
    emit(to_json(snaps, label, impl));
  else
    std::cout << to_text(snaps);
  bool ok = true;
  for (const auto& s : snaps) {
    if (s.fidelity < 1.0 - kVerifyTolerance) {
      std::cerr << "hbsa: " << to_string(s.checkpoint) << " fidelity " << format_probability(s.fidelity)
                << " below threshold\n";
      ok = false;
    }
  }
  return ok ? kExitOk : kExitFailure;
}

int cmd_describe(const Options& o) {
  const Circuit c = load(o);
  const ValidationReport v = validate(c);
  if (json(o)) {
    Json j = to_json(c);
    j["validation"] = to_json(v);
    emit(j);
  } else {
    std::cout << to_text(c);
    for (const auto& f : v.findings) {
      std::cout << "# " << to_string(f.severity);
      if (f.stage >= 0) std::cout << " [stage " << f.stage << "]";
      std::cout << ": " << f.message << "\n";
    }
  }
  return v.ok() ? kExitOk : kExitFailure;
}

int cmd_export_table(const Options& o) {
  const ClassificationTable& t = detector_table();
  if (json(o))
    emit(to_json(t));
  else
    std::cout << to_text(t);
  return kExitOk;
}

int cmd_oracle(const Options& o) {
  const Impl impl = impl_flag(o).value_or(Impl::Canonical);
  const Circuit circuit = load(o);
  const CompiledCircuit c = compile(circuit);
  const AssembledUnitary u = assemble_unitary(c);
  const auto da = input_domain(c, Photon::A);
  const auto db = input_domain(c, Photon::B);
  const auto random = compare_paths(c, u, random_domain_states(c.space, da, db, o.count, o.seed));
  const auto basis = compare_paths(c, u, domain_basis_states(c.space, da, db));
  double residual = 0.0;
  for (double x : unitarity_residuals(c, u)) residual = std::max(residual, x);
  double bell_tv = 0.0;
  const bool analyzer_paths = c.space->find("a1") && c.space->find("b1") && c.space->find("a2") && c.space->find("b2");
  if (analyzer_paths) bell_tv = oracle_check(c, impl);

  const bool ok = random.max_amplitude_deviation <= kVerifyTolerance &&
                  random.max_total_variation <= kVerifyTolerance &&
                  basis.max_amplitude_deviation <= kVerifyTolerance && residual <= kVerifyTolerance &&
                  bell_tv <= kVerifyTolerance;
  if (json(o)) {
    emit(Json{{"schema_version", kSchemaVersion},
              {"impl", to_string(impl)},
              {"seed", o.seed},
              {"photon_dimension", u.photon_dimension()},
              {"domain_a", da.size()},
              {"domain_b", db.size()},
              {"random_inputs", random.inputs},
              {"random_max_amplitude_deviation", random.max_amplitude_deviation},
              {"random_max_total_variation", random.max_total_variation},
              {"basis_inputs", basis.inputs},
              {"basis_max_amplitude_deviation", basis.max_amplitude_deviation},
              {"max_unitarity_residual", residual},
              {"bell_input_total_variation", bell_tv},
              {"pass", ok}});
  } else {
    std::cout << "impl: " << to_string(impl) << "\n"
              << "seed: " << o.seed << "\n"
              << "photon_dimension: " << u.photon_dimension() << "\n"
              << "domain: " << da.size() << " x " << db.size() << "\n"
              << "random_inputs: " << random.inputs << "\n"
              << "random_max_amplitude_deviation: " << random.max_amplitude_deviation << "\n"
              << "random_max_total_variation: " << random.max_total_variation << "\n"
              << "basis_inputs: " << basis.inputs << "\n"
              << "basis_max_amplitude_deviation: " << basis.max_amplitude_deviation << "\n"
              << "max_unitarity_residual: " << residual << "\n"
              << "bell_input_total_variation: " << bell_tv << "\n"
              << "result: " << (ok ? "PASS" : "FAIL") << "\n";
  }
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and verifier for a polarization Bell-state analyzer using OAM and path"};
  app.require_subcommand(1);
  Options o;

  const std::vector<std::string> impls{"canonical", "decomposed"};
  const std::vector<std::string> formats{"text", "json"};
  auto add_impl = [&](CLI::App* sub) {
    sub->add_option("--impl", o.impl, "Composite stage implementation")->check(CLI::IsMember(impls));
  };
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember(formats));
  };
  auto add_lmax = [&](CLI::App* sub) {
    sub->add_option("--lmax", o.lmax, "OAM truncation override")->check(CLI::Range(1, 64));
  };
  auto add_input = [&](CLI::App* sub) {
    sub->add_option("--input", o.input, "Bell state: phi+, phi-, psi+ or psi-")
        ->required()
        ->check(CLI::IsMember({"phi+", "phi-", "psi+", "psi-", "PhiPlus", "PhiMinus", "PsiPlus", "PsiMinus"}));
  };
  auto add_circuit = [&](CLI::App* sub) {
    sub->add_option("--circuit", o.circuit, "Circuit file or builtin:<name>");
  };

  auto* run = app.add_subcommand("run", "Print the coincidence distribution for one input");
  add_input(run);
  add_circuit(run);
  add_impl(run);
  add_format(run);
  add_lmax(run);

  auto* ver = app.add_subcommand("verify", "Check deterministic discrimination end to end");
  add_impl(ver);
  add_format(ver);
  add_lmax(ver);
  ver->add_option("--tamper-pattern", o.tamper, "Test hook: relabel one table pattern before verifying")
      ->group("");

  auto* stg = app.add_subcommand("stages", "Print the state after each stage group");
  add_input(stg);
  add_impl(stg);
  add_format(stg);
  add_lmax(stg);

  auto* desc = app.add_subcommand("describe", "Print a circuit in canonical form with validation notes");
  add_circuit(desc);
  add_impl(desc);
  add_format(desc);
  add_lmax(desc);

  auto* tab = app.add_subcommand("export-table", "Print the detector classification table");
  add_format(tab);

  auto* orc = app.add_subcommand("oracle", "Compare sparse propagation with the dense unitary");
  add_circuit(orc);
  add_impl(orc);
  add_format(orc);
  add_lmax(orc);
  orc->add_option("--seed", o.seed, "Seed for random domain vectors");
  orc->add_option("--count", o.count, "Number of random domain vectors")->check(CLI::Range(1, 10000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(o);
    if (*ver) return cmd_verify(o);
    if (*stg) return cmd_stages(o);
    if (*desc) return cmd_describe(o);
    if (*tab) return cmd_export_table(o);
    if (*orc) return cmd_oracle(o);
  } catch (const UsageError& e) {
    std::cerr << "hbsa: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "hbsa: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
