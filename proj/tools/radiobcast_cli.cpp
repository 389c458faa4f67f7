// radiobcast: families, simulation runs, adversarial instances and sweeps.
//
// Exit status: 0 ok, 1 completion not reached within the horizon,
// 2 configuration error, 3 internal invariant violation.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "radiobcast/experiment.hpp"
#include "radiobcast/radiobcast.hpp"

namespace rb = radiobcast;
namespace ex = radiobcast::experiment;

namespace {

constexpr int kOk = 0;
constexpr int kHorizon = 1;
constexpr int kConfig = 2;
constexpr int kInvariant = 3;

// Relative output paths land in $RADIOBCAST_OUT_DIR when it is set.
std::string resolve_out(const std::string& path) {
  if (path.empty() || path == "-") return {};
  std::filesystem::path p(path);
  if (const char* dir = std::getenv("RADIOBCAST_OUT_DIR"); dir && *dir && p.is_relative()) p = std::filesystem::path(dir) / p;
  return p.string();
}

template <typename Write>
void emit(const std::string& out_flag, Write&& write) {
  std::string path = resolve_out(out_flag);
  if (path.empty()) {
    write(std::cout);
    return;
  }
  if (auto parent = std::filesystem::path(path).parent_path(); !parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw rb::ConfigurationError("cannot write '" + path + "'");
  write(f);
}

ex::Format parse_format(const std::string& s) {
  if (s == "csv") return ex::Format::csv;
  if (s == "json") return ex::Format::json;
  throw rb::ConfigurationError("unknown format '" + s + "'");
}

std::shared_ptr<rb::ProtocolSchedule> oblivious_protocol(const std::string& name, std::size_t n, std::size_t k,
                                                         std::uint64_t seed) {
  if (name == "round-robin") return rb::protocols::round_robin(n);
  if (name == "always") return rb::protocols::always_transmit();
  if (name == "selective-cycle") return rb::protocols::selective_cycle(rb::setfam::FamilyCache::global().selective(n, k, seed));
  throw rb::ConfigurationError("adversary needs an oblivious protocol (round-robin, always, selective-cycle), got '" + name + "'");
}

rb::adversary::Variant parse_variant(const std::string& s) {
  if (s == "general") return rb::adversary::Variant::general;
  if (s == "degree") return rb::adversary::Variant::degree;
  throw rb::ConfigurationError("unknown variant '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic broadcast in unknown radio networks: families, simulation, adversaries, sweeps"};
  app.require_subcommand(1);

  std::string out, format = "csv";
  std::uint64_t seed = 1;

  // gen-family
  auto* gen = app.add_subcommand("gen-family", "construct a selective, strongly-selective or r-different family");
  std::string kind = "selective";
  std::size_t gn = 0, gk = 0, gr = 0;
  bool probabilistic = false;
  gen->add_option("--kind", kind, "selective | strong | rdiff")->check(CLI::IsMember({"selective", "strong", "rdiff"}));
  gen->add_option("--n", gn, "ground set size")->required();
  gen->add_option("--k", gk, "selectivity parameter (selective, strong)");
  gen->add_option("--r", gr, "alphabet size (rdiff)");
  gen->add_option("--seed", seed, "construction seed");
  gen->add_flag("--probabilistic", probabilistic, "skip exact verification of random families");
  gen->add_option("--out", out, "output file (default stdout)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "run one protocol on one instance");
  ex::ExperimentSpec spec;
  bool timing = false;
  std::size_t su = 2, sv = 3;
  sim->add_option("--graph", spec.graph, "path | star | layered | random | guv | tree | file")
      ->check(CLI::IsMember({"path", "star", "layered", "random", "guv", "tree", "file"}));
  sim->add_option("--in", spec.graph_file, "GRAPH file (with --graph file)");
  sim->add_option("--n", spec.n, "node count");
  sim->add_option("--d", spec.d, "eccentricity of layered graphs");
  sim->add_option("--delta", spec.delta, "maximum in-degree of generated graphs");
  sim->add_option("--r", spec.r, "messages at the source (leaves for tree)");
  sim->add_option("--u", su, "first sink in-neighbour of G_{u,v}");
  sim->add_option("--v", sv, "second sink in-neighbour of G_{u,v}");
  sim->add_option("--protocol", spec.protocol, "protocol")->check(CLI::IsMember(ex::protocol_names()));
  sim->add_option("--alpha", spec.alpha, "PROT-alpha parameter");
  sim->add_option("--family", spec.family, "'construct' or a SETFAM file");
  sim->add_option("--seed", seed, "seed for generators and families");
  sim->add_option("--horizon", spec.horizon, "maximum slots");
  sim->add_option("--format", format, "csv | json");
  sim->add_option("--out", out, "output file (default stdout)");
  sim->add_flag("--timing", timing, "report wall time");

  // adversary
  auto* adv = app.add_subcommand("adversary", "build a certified lower-bound graph against an oblivious protocol");
  std::string aprot = "round-robin", variant = "general";
  std::size_t an = 32, ad = 4, adelta = 0, awindow = 0;
  std::uint64_t budget = 2'000'000;
  adv->add_option("--protocol", aprot, "round-robin | always | selective-cycle");
  adv->add_option("--n", an, "node count");
  adv->add_option("--d", ad, "number of levels D");
  adv->add_option("--variant", variant, "general | degree");
  adv->add_option("--delta", adelta, "level size cap (degree variant); family k for selective-cycle");
  adv->add_option("--budget", budget, "subset evaluations per level");
  adv->add_option("--window", awindow, "longest window examined per level (default 4n)");
  adv->add_option("--seed", seed, "seed for the search and the family");
  adv->add_option("--out", out, "ADVGRAPH output file (default stdout)");

  // validate
  auto* val = app.add_subcommand("validate", "re-simulate an ADVGRAPH certificate");
  std::string vin, vprot = "round-robin";
  std::size_t vk = 2;
  val->add_option("--in", vin, "ADVGRAPH file")->required();
  val->add_option("--protocol", vprot, "protocol the graph was built against");
  val->add_option("--k", vk, "family k for selective-cycle");
  val->add_option("--seed", seed, "family seed for selective-cycle");

  // bench
  auto* bench = app.add_subcommand("bench", "sweep a parameter grid");
  ex::BenchGrid grid;
  std::string summary_out;
  bench->add_option("--n", grid.n, "node counts")->delimiter(',');
  bench->add_option("--d", grid.d, "eccentricities")->delimiter(',');
  bench->add_option("--delta", grid.delta, "maximum in-degrees")->delimiter(',');
  bench->add_option("--protocol", grid.protocols, "protocols")->delimiter(',');
  bench->add_option("--graph", grid.graph, "layered | random")->check(CLI::IsMember({"layered", "random"}));
  bench->add_option("--r", grid.r, "messages at the source");
  bench->add_option("--alpha", grid.alpha, "PROT-alpha parameter");
  bench->add_option("--reps", grid.reps, "repetitions per grid point");
  bench->add_option("--seed", seed, "master seed");
  bench->add_option("--horizon", grid.horizon, "maximum slots per run");
  bench->add_option("--jobs", grid.jobs, "worker threads (default: all cores)");
  bench->add_option("--format", format, "csv | json");
  bench->add_option("--out", out, "per-run rows (default stdout)");
  bench->add_option("--summary", summary_out, "median/max completion per grid point");
  bench->add_flag("--timing", timing, "report wall time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (gen->parsed()) {
      if (kind == "rdiff") {
        if (gr == 0) throw rb::ConfigurationError("rdiff needs --r");
        auto s = rb::setfam::build_r_different(gn, gr);
        emit(out, [&](std::ostream& o) { rb::io::write_sequences(o, s); });
        return kOk;
      }
      if (gk == 0) throw rb::ConfigurationError(kind + " needs --k");
      rb::setfam::SetFamily f;
      if (kind == "strong") f = rb::setfam::build_strongly_selective(gn, gk);
      else
        f = rb::setfam::build_selective(gn, gk, seed,
                                        probabilistic ? rb::setfam::VerifyMode::probabilistic : rb::setfam::VerifyMode::automatic);
      if (f.k_clamped) std::cerr << "warning: k clamped to n = " << gn << '\n';
      emit(out, [&](std::ostream& o) { rb::io::write_family(o, f); });
      return kOk;
    }

    if (sim->parsed()) {
      auto fmt = parse_format(format);
      spec.seed = seed;
      spec.u = static_cast<rb::Label>(su);
      spec.v = static_cast<rb::Label>(sv);
      auto row = ex::run_experiment(spec);
      emit(out, [&](std::ostream& o) { ex::write_rows(o, {row}, fmt, timing); });
      return row.completion_slot ? kOk : kHorizon;
    }

    if (adv->parsed()) {
      rb::adversary::AdversaryOptions opts;
      opts.variant = parse_variant(variant);
      opts.delta = adelta;
      opts.budget = budget;
      opts.max_window = awindow;
      opts.seed = seed;
      auto proto = oblivious_protocol(aprot, an, adelta ? adelta : 2, seed);
      auto g = rb::adversary::build_single_lb_graph(*proto, an, ad, opts);
      auto verdict = rb::adversary::validate_certificate(g, *proto);
      emit(out, [&](std::ostream& o) { rb::adversary::io::write_graph(o, g); });
      std::cerr << "levels=" << g.levels.size() - 1 << " certified_slots=" << g.certified_total() << " T'=";
      for (std::size_t j = 1; j < g.windows.size(); ++j) std::cerr << (j > 1 ? "," : "") << g.windows[j];
      std::cerr << " partial=" << (g.partial ? 1 : 0) << " validation=" << (verdict ? "pass" : "fail") << '\n';
      for (const auto& d : g.diagnostics) std::cerr << "note: " << d << '\n';
      if (!verdict) {
        std::cerr << "certificate failure at level " << verdict.level << " slot " << verdict.slot << ": " << verdict.reason << '\n';
        return kInvariant;
      }
      return kOk;
    }

    if (val->parsed()) {
      std::ifstream in(vin);
      if (!in) throw rb::ConfigurationError("cannot open '" + vin + "'");
      auto g = rb::adversary::io::read_graph(in);
      auto proto = oblivious_protocol(vprot, g.n, vk, seed);
      auto verdict = rb::adversary::validate_certificate(g, *proto);
      if (verdict) {
        std::cout << "pass certified_slots=" << g.certified_total() << '\n';
        return kOk;
      }
      std::cout << "fail level=" << verdict.level << " slot=" << verdict.slot << " reason=" << verdict.reason << '\n';
      return kInvariant;
    }

    if (bench->parsed()) {
      auto fmt = parse_format(format);
      grid.seed = seed;
      auto res = ex::run_bench(grid);
      emit(out, [&](std::ostream& o) { ex::write_rows(o, res.rows, fmt, timing); });
      if (!summary_out.empty())
        emit(summary_out, [&](std::ostream& o) { ex::write_summary(o, res.summary, fmt); });
      return kOk;
    }
  } catch (const rb::io::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const rb::ContractViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kInvariant;
  } catch (const rb::ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const rb::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const rb::ConstructionFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInvariant;
  }
  return kOk;
}
