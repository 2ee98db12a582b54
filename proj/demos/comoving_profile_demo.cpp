// Prints coarse u-profiles at a few times for one comoving cell, the same
// picture the phase-diagram verdicts condense.

#include <cstdio>
#include <cstdlib>

#include "chemospread/front.hpp"

using namespace chemospread;

int main(int argc, char** argv) {
  ModelParams p;
  p.chi = argc > 1 ? std::atof(argv[1]) : 10.0;
  p.c = argc > 2 ? std::atof(argv[2]) : 2.01;
  GridSpec g;
  g.T = argc > 3 ? std::atof(argv[3]) : 100.0;

  SnapshotRecorder rec(g);
  RunOptions opt;
  opt.snapshot_stride = g.steps() / 4;
  run(sample_initial(InitialData::paper_bump(), g), p, g, {rec.observer()}, opt);

  const auto& s = rec.series();
  std::printf("chi = %g, c = %g; u(t, x) every 2 units of x\n", p.chi, p.c);
  for (std::size_t k = 0; k < s.size(); ++k) {
    std::printf("t=%7.2f |", s.times[k]);
    for (int i = 0; i <= s.M; i += 20) std::printf(" %.2f", s.u[k][i]);
    std::printf("\n");
  }

  auto o = classify(p, g, InitialData::paper_bump());
  std::printf("verdict at T = %g: %s [%s]\n", g.T, to_string(o.verdict),
              to_string(o.basis));
  return 0;
}
