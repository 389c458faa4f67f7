// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "radiobcast/adversary.hpp"
#include "radiobcast/bruteforce.hpp"
#include "radiobcast/broadcast.hpp"
#include "radiobcast/experiment.hpp"
#include "radiobcast/multi.hpp"
#include "radiobcast/provision.hpp"

using namespace radiobcast;
using namespace radiobcast::protocols;

namespace {

struct Failure {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::size_t lg(std::size_t x) { return setfam::ceil_log2(x); }

// Random digraphs with every node reachable from label 1.
struct CorpusGraph {
  RadioGraph g;
  std::uint64_t seed;
};

std::vector<CorpusGraph> corpus() {
  std::vector<CorpusGraph> out;
  rng::Engine e(4242);
  for (std::uint64_t i = 0; i < 100; ++i) {
    std::size_t n = 8 + rng::below(e, 121);
    std::size_t delta = 1 + rng::below(e, 8);
    std::uint64_t seed = rng::derive(77, i);
    auto g = graphs::random_indegree(n, delta, seed);
    out.push_back({std::move(g), seed});
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string criterion_1() {
  rng::Engine g(99);
  std::size_t deliveries = 0;
  for (int trial = 0; trial < 10'000; ++trial) {
    std::size_t n = 1 + rng::below(g, 64);
    RadioGraph gr(n);
    double p = rng::unit(g) * 0.25;
    for (Label u = 1; u <= n; ++u)
      for (Label v = 1; v <= n; ++v)
        if (u != v && rng::unit(g) < p) gr.add_edge(u, v);
    std::vector<Message> payload(n + 1);
    std::vector<Action> act(n + 1);
    for (Label v = 1; v <= n; ++v) {
      payload[v] = {v, 1};
      auto r = rng::below(g, 3);
      act[v] = r == 0 ? Action::inactive() : r == 1 ? Action::receive() : Action::transmit({&payload[v], 1});
    }
    // Reference: count transmitting in-neighbours edge by edge.
    std::vector<Delivery> want;
    for (Label v = 1; v <= n; ++v) {
      if (act[v].kind != ActionKind::receive) continue;
      std::size_t cnt = 0;
      Label who = 0;
      for (auto [a, b] : gr.edges())
        if (b == v && act[a].kind == ActionKind::transmit) {
          ++cnt;
          who = a;
        }
      if (cnt == 1) want.push_back({v, who, payload[who]});
    }
    auto got = step(gr, act, ChannelMode::bb);
    require(got == want, "trial " + std::to_string(trial) + " differs from reference");
    deliveries += got.size();
  }
  return "10000 trials, " + std::to_string(deliveries) + " deliveries matched";
}

std::string criterion_2() {
  for (std::size_t n : {8, 12, 16, 24})
    for (std::size_t k : {2, 3, 4, 6}) {
      auto f = setfam::build_selective(n, k, 1, setfam::VerifyMode::verified);
      require(f.claim.guarantee == setfam::Guarantee::verified, "selective claim not verified");
      require(setfam::verify_selective_exact(f, k).pass, "selective (" + std::to_string(n) + "," + std::to_string(k) + ") fails");
    }
  for (std::size_t n : {9, 16, 64})
    for (std::size_t k : {2, 3}) {
      auto f = setfam::build_strongly_selective(n, k);
      require(setfam::verify_strongly_selective_exact(f, k).pass,
              "strong (" + std::to_string(n) + "," + std::to_string(k) + ") fails");
    }
  std::size_t fallbacks = 0;
  for (std::size_t n = 1; n <= 64; ++n)
    for (std::size_t k = 1; k <= std::min<std::size_t>(n, 8); ++k) {
      auto [q, m] = setfam::choose_code_params(n, k);
      if (q * q < n) continue;
      require(setfam::build_strongly_selective(n, k).sets == setfam::singleton_family(n).sets,
              "no singleton fallback at (" + std::to_string(n) + "," + std::to_string(k) + ")");
      ++fallbacks;
    }
  return "16 selective + 6 strong families verified; " + std::to_string(fallbacks) + " fallback cases are singletons";
}

std::size_t selective_bound(std::size_t n, std::size_t k) {
  std::size_t total = 0;
  for (std::size_t i = 1; (std::size_t{1} << (i - 1)) < k; ++i) {
    double j = std::ldexp(1.0, static_cast<int>(i - 1));
    double lnc = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
    total += static_cast<std::size_t>(std::ceil(8.0 * (lnc + i * std::log(2.0)))) + 1;
  }
  return total;
}

std::string criterion_3() {
  std::size_t checked = 0;
  for (std::size_t n : {8, 12, 16, 24})
    for (std::size_t k : {2, 3, 4, 6}) {
      auto f = setfam::build_selective(n, k, 1, setfam::VerifyMode::verified);
      require(f.size() <= selective_bound(n, k), "selective size above budget at n=" + std::to_string(n));
      ++checked;
    }
  for (std::size_t n = 2; n <= 256; n += (n < 32 ? 1 : 7))
    for (std::size_t k = 1; k <= std::min<std::size_t>(n, 8); ++k) {
      auto f = setfam::build_strongly_selective(n, k);
      std::size_t b = 4 * k * k * (lg(n) + 1) * (lg(n) + 1);
      require(f.size() <= std::min(n, b), "strong size above bound at (" + std::to_string(n) + "," + std::to_string(k) + ")");
      ++checked;
    }
  return std::to_string(checked) + " families within bounds";
}

std::string criterion_4() {
  std::size_t nodes = 0;
  for (const auto& [g, seed] : corpus()) {
    const std::size_t n = g.size();
    const std::size_t delta = std::max<std::size_t>(1, g.max_in_degree());
    auto fam = setfam::FamilyCache::global().selective(n, delta, 1);
    require(fam->claim.guarantee == setfam::Guarantee::verified ||
                fam->claim.guarantee == setfam::Guarantee::certified_by_construction,
            "family not certified");
    auto p = broad_a(n, delta, fam);
    auto inst = BroadcastInstance::single(g, 1);
    auto tr = run(inst, *p);
    auto dist = g.distances_from(1);
    const std::string tag = " (graph seed " + std::to_string(seed) + ")";
    require(tr.completion.has_value(), "no completion" + tag);
    for (Label v = 2; v <= n; ++v) {
      require(*p->phase_of(*tr.first_reception[v][0]) + 1 == *dist[v],
              "node " + std::to_string(v) + " informed off its level" + tag);
      ++nodes;
    }
    auto m = metrics(inst);
    require(*tr.completion <= m.eccentricity * fam->size(), "completion above D|F|" + tag);
    for (Slot t = 1; t < tr.slots.size(); ++t)
      require(tr.at(t).kinds[0] == ActionKind::inactive, "source active after slot 0" + tag);
    auto ph = oracles::transmit_phases(tr, [&](Slot t) { return *p->phase_of(t); });
    for (Label v = 1; v <= n; ++v) require(ph[v].size() <= 1, "node transmits in two phases" + tag);
  }
  return "100 graphs, " + std::to_string(nodes) + " nodes on their level";
}

std::string criterion_5() {
  std::size_t worst_num = 0, worst_den = 1;
  for (const auto& [g, seed] : corpus()) {
    const std::size_t n = g.size();
    auto p = BroadB::provisioned(n, 1);
    auto inst = BroadcastInstance::single(g, 1);
    auto tr = run(inst, *p, {.record_slots = false});
    auto m = metrics(inst);
    const std::size_t l = std::max<std::size_t>(1, lg(m.max_in_degree));
    const std::size_t bound = lg(n) * m.eccentricity * p->family(l).size();
    const std::string tag = " (graph seed " + std::to_string(seed) + ", n=" + std::to_string(n) + ")";
    require(tr.completion.has_value(), "no completion" + tag);
    require(*tr.completion <= bound,
            "completion " + std::to_string(*tr.completion) + " > " + std::to_string(bound) + tag);
    if (*tr.completion * worst_den > worst_num * bound) {
      worst_num = *tr.completion;
      worst_den = bound;
    }
  }
  return "100 graphs within bound; tightest " + std::to_string(worst_num) + "/" + std::to_string(worst_den);
}

std::string criterion_6() {
  // Phase arithmetic: closed form, stage sum and simulated phase starts.
  for (double alpha : {1.0, 2.0}) {
    DovetailSchedule s(alpha);
    for (std::uint64_t k = 1; k <= 8; ++k) {
      u128 direct = 0;
      for (std::uint64_t l = 0; l < k; ++l) direct += (u128{1} << s.exponent(k)) * (k - l);
      require(s.phase_end(k) == direct && s.phase_end_cumulative(k) == direct,
              "phase end mismatch at k=" + std::to_string(k));
    }
    const std::uint64_t k_sim = alpha == 1.0 ? 4 : 8;
    std::map<std::uint64_t, std::set<Slot>> seen;
    ProtAlphaOptions o;
    o.policy = Deactivation::all_executions;
    o.on_phase_start = [&](Label, std::uint64_t k, Slot t) { seen[k].insert(t); };
    auto p = prot_alpha(alpha, o);
    auto g = graphs::random_indegree(8, 3, 11);
    RunOptions ro;
    ro.record_slots = false;
    ro.max_slots = static_cast<Slot>(s.phase_end(k_sim)) + 1;
    run(BroadcastInstance::single(g, 1), *p, ro);
    for (std::uint64_t k = 2; k <= k_sim + 1; ++k) {
      require(seen[k].size() == 1, "phase " + std::to_string(k) + " start not observed once");
      require(static_cast<u128>(*seen[k].begin()) == s.phase_end(k - 1),
              "phase " + std::to_string(k) + " starts at the wrong slot");
    }
  }

  // Completion within the phase holding t_end of BROAD-B(2^⌈log n⌉).
  std::size_t runs = 0;
  for (double alpha : {1.0, 2.0}) {
    DovetailSchedule s(alpha);
    std::vector<std::size_t> sizes = alpha == 1.0 ? std::vector<std::size_t>{2, 4, 6, 8}
                                                   : std::vector<std::size_t>{2, 5, 8, 16, 24, 32, 48, 64};
    for (std::size_t n : sizes)
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        auto g = graphs::random_indegree(n, 4, rng::derive(600, n, seed));
        auto inst = BroadcastInstance::single(g, 1);
        const std::size_t l = lg(n);
        auto bb = broad_b(std::size_t{1} << l, ProtAlpha(alpha).families(l));
        auto ref = run(inst, *bb, {.record_slots = false});
        require(ref.completion.has_value(), "embedded broad-b did not complete");
        const Slot t_end = *ref.completion;
        std::uint64_t k = l + 1;
        while (s.f(k, l) <= t_end) ++k;
        const u128 deadline = s.phase_end(k);
        RunOptions ro;
        ro.record_slots = false;
        ro.max_slots = static_cast<Slot>(deadline);
        auto tr = run(inst, *prot_alpha(alpha), ro);
        const std::string tag = " (alpha=" + std::to_string(static_cast<int>(alpha)) + ", n=" + std::to_string(n) +
                                ", seed " + std::to_string(seed) + ", phase " + std::to_string(k) + ")";
        require(tr.completion.has_value(), "no completion by slot " + std::to_string(ro.max_slots.value()) + tag);
        ++runs;
      }
  }
  return "phase ends exact for k<=8; phase starts simulated; " + std::to_string(runs) + " completions in time";
}

std::string criterion_7() {
  rng::Engine e(2718);
  std::size_t progress_checks = 0;
  for (int i = 0; i < 50; ++i) {
    std::size_t n = 8 + rng::below(e, 57);
    std::size_t delta = 1 + rng::below(e, 4);
    auto g = graphs::random_indegree(n, delta, rng::derive(31, i));
    std::size_t r = 1 + rng::below(e, 8);
    std::size_t nsrc = 1 + rng::below(e, std::min<std::size_t>(r, 3));
    std::vector<SourceSpec> src;
    std::set<Label> used;
    std::size_t left = r;
    for (std::size_t s = 0; s < nsrc; ++s) {
      Label v;
      do v = static_cast<Label>(1 + rng::below(e, n));
      while (used.count(v));
      used.insert(v);
      std::uint32_t c = static_cast<std::uint32_t>(s + 1 == nsrc ? left : 1 + rng::below(e, left - (nsrc - s - 1)));
      left -= c;
      src.push_back({v, c});
    }
    BroadcastInstance inst{g, src, ChannelMode::bb};
    const std::size_t d = std::max<std::size_t>(1, g.max_in_degree());
    auto fam = setfam::FamilyCache::global().strong(n, d + 1);
    require(fam->claim.kind == setfam::FamilyKind::strongly_selective, "family not strongly selective");
    auto p = multi_bb(n, d, fam);
    auto tr = run(inst, *p);
    auto m = metrics(inst);
    const std::string tag = " (instance " + std::to_string(i) + ")";
    auto last = oracles::phases_to_deliver(inst, tr, fam->size());
    require(last.has_value(), "undelivered message" + tag);
    require(*last <= m.eccentricity + m.congestion - 1,
            std::to_string(*last) + " phases needed > D+c-1 = " +
                std::to_string(m.eccentricity + m.congestion - 1) + tag);
    auto miss = oracles::per_phase_progress(inst, tr, fam->size());
    require(miss.empty(), miss + tag);
    progress_checks += tr.transmissions_total;
  }
  return "50 instances within D+c-1; " + std::to_string(progress_checks) + " transmissions checked for progress";
}

std::string criterion_8() {
  std::ostringstream note;
  for (auto [n, d] : {std::pair<std::size_t, std::size_t>{32, 4}, {64, 4}, {64, 8}}) {
    auto p = round_robin(n);
    auto g = adversary::build_single_lb_graph(*p, n, d);
    const std::string tag = " (n=" + std::to_string(n) + ", D=" + std::to_string(d) + ")";
    require(g.certified_total() >= 2 * d, "certified " + std::to_string(g.certified_total()) + " < 2D" + tag);
    auto v = adversary::validate_certificate(g, *p);
    require(v.pass, "certificate rejected: " + v.reason + tag);
    RunOptions ro;
    ro.record_slots = false;
    ro.stop_on_completion = true;
    ro.max_slots = g.certified_total() + default_horizon(n);
    auto tr = run(BroadcastInstance::single(g.graph, 1), *p, ro);
    require(tr.completion && *tr.completion >= g.certified_total(), "completion below certificate" + tag);
    note << "(" << n << "," << d << "): " << g.certified_total() << "<=" << *tr.completion << "; ";
  }
  for (std::size_t delta : {1, 2, 4, 8}) {
    adversary::AdversaryOptions o;
    o.variant = adversary::Variant::degree;
    o.delta = delta;
    auto p = round_robin(64);
    auto g = adversary::build_single_lb_graph(*p, 64, 8, o);
    require(g.graph.max_in_degree() <= delta, "degree variant exceeds delta " + std::to_string(delta));
    require(adversary::validate_certificate(g, *p).pass, "degree certificate rejected");
  }
  return note.str() + "degree variant within delta";
}

std::string criterion_9() {
  const std::size_t n = 8, r = 2;
  auto family = adversary::build_guv_family(n, r);
  auto fam = setfam::FamilyCache::global().strong(n, 3);
  Slot horizon = 0;
  for (const auto& g : family) {
    auto tr = run(g.instance, *multi_bb(n, 2, fam), {.record_slots = false});
    require(tr.completion.has_value(), "MULTI-BB did not complete on G_{" + std::to_string(g.u) + "," + std::to_string(g.v) + "}");
    horizon = std::max(horizon, *tr.completion + 1);
  }
  for (const auto& g : family) {
    auto tr = run(g.instance, *multi_bb(n, 2, fam), {.max_slots = horizon, .stop_on_quiescence = false});
    auto v = setfam::verify_r_different(adversary::extract_sequences(tr, adversary::guv_second_level(n), r, horizon));
    require(v.pass, "rows " + std::to_string(v.u) + "," + std::to_string(v.v) + " not r-different");
  }
  for (std::size_t nn : {4, 16, 64})
    for (std::size_t rr : {1, 2, 8}) {
      auto s = setfam::build_r_different(nn, rr);
      require(s.length() == 2 * lg(nn) * rr, "wrong length");
      require(setfam::verify_r_different(s).pass, "builder output fails the checker");
    }
  return std::to_string(family.size()) + " G_{u,v} runs over " + std::to_string(horizon) + " slots; 9 builder outputs";
}

std::string criterion_10() {
  require(setfam::min_selective_size_bruteforce(3, 1, false) == 1, "(3,1) value is not 1");
  std::size_t pairs = 0;
  for (std::size_t n = 1; n <= 6; ++n)
    for (std::size_t k = 1; k <= n; ++k) {
      auto best = setfam::min_selective_size_bruteforce(n, k, false);
      auto best_strong = setfam::min_selective_size_bruteforce(n, k, true);
      std::vector<setfam::SetFamily> sel{setfam::certified_selective(n, k, 1), setfam::build_strongly_selective(n, k)};
      if (n > 2 && k > 1) sel.push_back(setfam::build_selective(n, k, 1, setfam::VerifyMode::verified));
      for (const auto& f : sel) {
        require(setfam::verify_selective_exact(f, k).pass, "constructed family not selective");
        require(best <= f.size(), "oracle above a constructed family at (" + std::to_string(n) + "," + std::to_string(k) + ")");
        ++pairs;
      }
      auto strong = setfam::build_strongly_selective(n, k);
      require(best_strong <= strong.size(), "strong oracle above construction");
      ++pairs;
    }
  return std::to_string(pairs) + " comparisons; (3,1) = 1";
}

std::string criterion_11() {
  namespace ex = radiobcast::experiment;
  ex::BenchGrid g;
  g.n = {16, 32};
  g.d = {2, 4};
  g.delta = {2, 4};
  g.protocols = {"broad-a", "broad-b", "multi-bb", "round-robin", "selective-cycle"};
  g.reps = 2;
  g.seed = 123;
  auto render = [](const ex::BenchResult& r) {
    std::ostringstream o;
    ex::write_rows(o, r.rows, ex::Format::csv, false);
    ex::write_summary(o, r.summary, ex::Format::json);
    ex::write_rows(o, r.rows, ex::Format::json, false);
    return o.str();
  };
  auto a = render(ex::run_bench(g));
  g.jobs = 1;
  auto b = render(ex::run_bench(g));
  require(a == b, "bench output differs between runs");
  return std::to_string(a.size()) + " bytes identical";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<std::string()>>> criteria{
      {"collision rule matches reference", criterion_1},
      {"selectivity verification", criterion_2},
      {"family size bounds", criterion_3},
      {"BROAD-A level synchrony", criterion_4},
      {"BROAD-B completion bound", criterion_5},
      {"PROT-alpha dovetail arithmetic", criterion_6},
      {"MULTI-BB delivery bound", criterion_7},
      {"adversary soundness", criterion_8},
      {"r-different necessity", criterion_9},
      {"brute-force oracle consistency", criterion_10},
      {"bench determinism", criterion_11},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto t0 = Clock::now();
    std::string verdict, detail;
    try {
      detail = criteria[i].second();
      verdict = "PASS";
    } catch (const Failure& f) {
      verdict = "FAIL";
      detail = f.what;
    } catch (const std::exception& e) {
      verdict = "FAIL";
      detail = std::string("exception: ") + e.what();
    }
    if (verdict == "FAIL") ++failed;
    std::cout << verdict << " [" << i + 1 << "] " << criteria[i].first << " (" << std::fixed;
    std::cout.precision(1);
    std::cout << seconds_since(t0) << " s): " << detail << std::endl;
  }
  return failed ? 1 : 0;
}
