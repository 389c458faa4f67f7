// Broadcast on a random layered network with BROAD-A, then multi-broadcast
// of three messages with MULTI-BB on the same topology.

#include <iostream>

#include "radiobcast/radiobcast.hpp"

using namespace radiobcast;

int main() {
  auto layering = graphs::layered(graphs::even_levels(40, 5), 3, /*seed=*/7);
  auto single = BroadcastInstance::single(layering.graph, 1);
  auto m = metrics(single);
  std::cout << "n=" << m.n << " D=" << m.eccentricity << " Delta=" << m.max_in_degree << '\n';

  auto fam = setfam::FamilyCache::global().selective(m.n, m.max_in_degree, /*seed=*/1);
  auto a = protocols::broad_a(m.n, m.max_in_degree, fam);
  auto ta = run(single, *a);
  std::cout << "broad-a: |F|=" << fam->size() << " completion=" << *ta.completion
            << " termination=" << *ta.termination << '\n';

  BroadcastInstance multi{layering.graph, {{1, 3}}, ChannelMode::bb};
  auto strong = setfam::FamilyCache::global().strong(m.n, m.max_in_degree + 1);
  auto mb = protocols::multi_bb(m.n, m.max_in_degree, strong);
  RunOptions opts;
  opts.stop_on_completion = true;
  auto tb = run(multi, *mb, opts);
  auto mm = metrics(multi);
  std::cout << "multi-bb: |F|=" << strong->size() << " completion=" << *tb.completion << " phases="
            << *mb->phase_of(*tb.completion) + 1 << " (bound D+c-1=" << mm.eccentricity + mm.congestion - 1 << ")\n";
}
