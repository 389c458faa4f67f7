#include <gtest/gtest.h>

#include <sstream>

#include "radiobcast/adversary.hpp"
#include "radiobcast/multi.hpp"
#include "radiobcast/provision.hpp"

using namespace radiobcast;
using namespace radiobcast::adversary;

namespace {

Slot simulated_completion(const LayeredAdversarialGraph& g, const ProtocolSchedule& p) {
  RunOptions o;
  o.record_slots = false;
  o.stop_on_completion = true;
  o.max_slots = g.certified_total() + default_horizon(g.n);
  auto tr = run(BroadcastInstance::single(g.graph, g.source), p, o);
  return tr.completion.value_or(o.max_slots.value());
}

std::shared_ptr<ProtocolSchedule> oblivious(const std::string& name, std::size_t n, std::uint64_t seed) {
  if (name == "round-robin") return protocols::round_robin(n);
  if (name == "always") return protocols::always_transmit();
  return protocols::selective_cycle(setfam::FamilyCache::global().selective(n, 4, seed));
}

}  // namespace

TEST(Adversary, RoundRobinSixteenTwoCertifiesAWindow) {
  auto p = protocols::round_robin(16);
  auto g = build_single_lb_graph(*p, 16, 2);
  ASSERT_EQ(g.levels.size(), 3U);
  ASSERT_EQ(g.certificates.size(), 1U);
  EXPECT_GE(g.windows[2], 2U);
  EXPECT_FALSE(g.certificates[0].subset.empty());
  EXPECT_TRUE(validate_certificate(g, *p).pass);
}

TEST(Adversary, DepthOneIsDegenerate) {
  auto p = protocols::round_robin(8);
  auto g = build_single_lb_graph(*p, 8, 1);
  ASSERT_EQ(g.levels.size(), 2U);
  EXPECT_EQ(g.levels[1].size(), 7U);
  EXPECT_EQ(g.certified_total(), 0U);
  EXPECT_TRUE(g.certificates.empty());
  EXPECT_TRUE(validate_certificate(g, *p).pass);
}

TEST(Adversary, AlwaysTransmitNeverSelectsPairs) {
  auto p = protocols::always_transmit();
  AdversaryOptions o;
  o.max_window = 40;
  auto g = build_single_lb_graph(*p, 24, 3, o);
  EXPECT_EQ(g.windows[2], 40U);
  EXPECT_GE(g.levels[1].size(), 2U);
  EXPECT_TRUE(validate_certificate(g, *p).pass);
  EXPECT_FALSE(g.diagnostics.empty());
}

TEST(Adversary, PreconditionsAreChecked) {
  auto p = protocols::round_robin(32);
  AdversaryOptions zero;
  zero.budget = 0;
  EXPECT_THROW(build_single_lb_graph(*p, 32, 4, zero), ConfigurationError);
  EXPECT_THROW(build_single_lb_graph(*p, 12, 4), ConfigurationError);
  auto fam = setfam::FamilyCache::global().selective(8, 2, 1);
  EXPECT_THROW(build_single_lb_graph(*protocols::broad_a(8, 2, fam), 8, 1), ConfigurationError);
  AdversaryOptions deg;
  deg.variant = Variant::degree;
  EXPECT_THROW(build_single_lb_graph(*p, 32, 4, deg), ConfigurationError);
}

class Soundness : public ::testing::TestWithParam<std::tuple<std::string, std::size_t>> {};

TEST_P(Soundness, CertificatesValidateAndLowerBoundCompletion) {
  auto [name, n] = GetParam();
  const std::size_t depth = n / 8;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto p = oblivious(name, n, seed);
    AdversaryOptions o;
    o.seed = seed;
    auto g = build_single_lb_graph(*p, n, depth, o);
    auto v = validate_certificate(g, *p);
    ASSERT_TRUE(v.pass) << name << " n=" << n << " seed=" << seed << ": " << v.reason;
    EXPECT_GE(simulated_completion(g, *p), g.certified_total()) << name << " seed " << seed;
    if (name != "selective-cycle") break;  // the other schedules do not depend on the seed
  }
}

INSTANTIATE_TEST_SUITE_P(Oblivious, Soundness,
                         ::testing::Combine(::testing::Values("round-robin", "always", "selective-cycle"),
                                            ::testing::Values(16, 32, 64)),
                         [](const auto& info) {
                           auto s = std::get<0>(info.param) + "_" + std::to_string(std::get<1>(info.param));
                           std::replace(s.begin(), s.end(), '-', '_');
                           return s;
                         });

TEST(Adversary, TamperedSetIsCaughtAtItsSlot) {
  auto p = protocols::round_robin(32);
  auto g = build_single_lb_graph(*p, 32, 4);
  ASSERT_FALSE(g.certificates.empty());
  auto& c = g.certificates[1];
  ASSERT_GE(c.window, 3U);

  auto selecting = g;
  selecting.certificates[1].sets[2] = LabelSet(32, {c.subset[0]});
  auto v = validate_certificate(selecting, *p);
  EXPECT_FALSE(v.pass);
  EXPECT_EQ(v.level, c.level);
  EXPECT_EQ(v.slot, c.start + 2);

}

TEST(Adversary, RecordedTransmittersMustMatchSimulation) {
  auto p = protocols::always_transmit();
  AdversaryOptions o;
  o.max_window = 20;
  auto g = build_single_lb_graph(*p, 24, 3, o);
  ASSERT_FALSE(g.certificates.empty());
  auto& c = g.certificates[0];
  ASSERT_GE(c.subset.size(), 2U);
  ASSERT_GE(c.window, 5U);
  c.sets[4] = LabelSet(24);
  auto v = validate_certificate(g, *p);
  EXPECT_FALSE(v.pass);
  EXPECT_EQ(v.level, c.level);
  EXPECT_EQ(v.slot, c.start + 4);
}

TEST(Adversary, InflatedWindowIsCaught) {
  auto p = protocols::round_robin(32);
  auto g = build_single_lb_graph(*p, 32, 4);
  g.windows[3] += 100;
  auto v = validate_certificate(g, *p);
  EXPECT_FALSE(v.pass);
  EXPECT_EQ(v.level, 3U);
}

TEST(Adversary, DegreeVariantRespectsDelta) {
  auto p = protocols::round_robin(32);
  for (std::size_t delta : {1, 2, 3, 5}) {
    AdversaryOptions o;
    o.variant = Variant::degree;
    o.delta = delta;
    auto g = build_single_lb_graph(*p, 32, 4, o);
    EXPECT_LE(g.graph.max_in_degree(), delta);
    EXPECT_TRUE(validate_certificate(g, *p).pass);
  }
}

TEST(Adversary, GraphFileRoundTrip) {
  auto p = protocols::round_robin(32);
  auto g = build_single_lb_graph(*p, 32, 4);
  std::stringstream s;
  adversary::io::write_graph(s, g);
  auto back = adversary::io::read_graph(s);
  EXPECT_EQ(back, g);
  EXPECT_EQ(adversary::io::to_text(back), adversary::io::to_text(g));
}

TEST(Adversary, GraphFileErrors) {
  std::stringstream empty;
  EXPECT_THROW(adversary::io::read_graph(empty), radiobcast::io::FormatError);
  std::stringstream noend("ADVGRAPH v1 n=3 D=1 variant=general delta=0 source=1 partial=0\nLEVEL 0 T=0 1\n");
  EXPECT_THROW(adversary::io::read_graph(noend), radiobcast::io::FormatError);
}

TEST(Guv, PairEnumeration) {
  EXPECT_EQ(build_guv_family(4, 1).size(), 1U);
  auto five = build_guv_family(5, 1);
  ASSERT_EQ(five.size(), 3U);
  std::vector<std::pair<Label, Label>> pairs;
  for (const auto& g : five) pairs.emplace_back(g.u, g.v);
  EXPECT_EQ(pairs, (std::vector<std::pair<Label, Label>>{{2, 3}, {2, 4}, {3, 4}}));
  EXPECT_EQ(build_guv_family(6, 2).size(), 6U);
  EXPECT_THROW(build_guv_family(3, 1), std::invalid_argument);
}

TEST(Tree, SmallestTree) {
  auto t = build_tree_multisource(2, 2);
  EXPECT_EQ(t.leaves, (std::vector<Label>{2, 3}));
  EXPECT_EQ(t.root, 1U);
  EXPECT_EQ(t.instance.message_count(), 2U);
}

TEST(Tree, DepthGrowsByLogR) {
  auto t = build_tree_multisource(4, 4);
  auto m = metrics(t.instance);
  EXPECT_EQ(m.eccentricity, 4U);
  EXPECT_EQ(m.congestion, 4U);
  EXPECT_EQ(m.r, 4U);
}

TEST(Tree, NonPowerOfTwoRejectedWithPadding) {
  try {
    build_tree_multisource(3, 2);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("pad"), std::string::npos);
  }
}

TEST(Tree, MultiBBWithinBound) {
  auto t = build_tree_multisource(2, 4);
  auto m = metrics(t.instance);
  auto p = protocols::multi_bb(m.n, m.max_in_degree, setfam::FamilyCache::global().strong(m.n, m.max_in_degree + 1));
  auto tr = run(t.instance, *p);
  ASSERT_TRUE(tr.completion);
  EXPECT_LE(*tr.completion / p->family_size() + 1, m.eccentricity + m.congestion - 1);
}

TEST(Sequences, TranscriptionOfTransmissions) {
  RadioGraph g(6, {{1, 2}, {2, 3}, {3, 4}, {4, 5}});
  auto tr = run(BroadcastInstance::single(g, 1), *protocols::round_robin(6), {.max_slots = 6});
  auto s = extract_sequences(tr, {4, 6}, 1, 5);
  EXPECT_EQ(s.row(0), (std::vector<setfam::SequenceSet::Symbol>{0, 0, 0, 1, 0}));
  EXPECT_EQ(s.row(1), (std::vector<setfam::SequenceSet::Symbol>{0, 0, 0, 0, 0}));
  EXPECT_THROW(extract_sequences(tr, {7}, 1, 5), std::out_of_range);
  EXPECT_THROW(extract_sequences(tr, {4}, 1, 50), std::out_of_range);
}

TEST(Sequences, MultiBBSecondLevelIsRDifferent) {
  for (std::size_t n = 4; n <= 10; ++n)
    for (std::size_t r = 1; r <= 3; ++r) {
      auto fam = setfam::FamilyCache::global().strong(n, 3);
      auto family = build_guv_family(n, r);
      Slot horizon = 0;
      bool all = true;
      for (const auto& g : family) {
        auto tr = run(g.instance, *protocols::multi_bb(n, 2, fam), {.record_slots = false});
        all = all && tr.completion;
        if (tr.completion) horizon = std::max(horizon, *tr.completion + 1);
      }
      ASSERT_TRUE(all) << n << "," << r;
      auto tr = run(family.front().instance, *protocols::multi_bb(n, 2, fam),
                    {.max_slots = horizon, .stop_on_quiescence = false});
      auto seqs = extract_sequences(tr, guv_second_level(n), r, horizon);
      EXPECT_TRUE(setfam::verify_r_different(seqs).pass) << n << "," << r;
    }
}
