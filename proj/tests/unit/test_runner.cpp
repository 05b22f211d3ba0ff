#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>
#include <string>

#include "pdpsim/config.hpp"
#include "pdpsim/csv.hpp"
#include "pdpsim/runner.hpp"

using namespace pdp;

namespace {

RunConfig small_jc() {
  RunConfig c;
  c.model = ModelKind::Jc;
  c.n_trajectories = 300;
  c.chunk_size = 32;
  c.t_max = 2.0;
  c.n_grid = 9;
  c.seed = 77;
  return c;
}

RunConfig small_spin() {
  RunConfig c;
  c.model = ModelKind::SpinBath;
  c.n_spins = 50;
  c.n_trajectories = 200;
  c.chunk_size = 16;
  c.t_max = 2.0;
  c.n_grid = 9;
  return c;
}

std::string to_csv(const CsvTable& t) {
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

}  // namespace

TEST_CASE("config text: comments, blanks, overrides") {
  const RunConfig c = parse_config(
      "# strong coupling\n"
      "model = jc\n"
      "\n"
      "gamma0 = 2.5   # inline\n"
      "n_trajectories = 1234\n"
      "reference = born_markov\n");
  CHECK(c.model == ModelKind::Jc);
  CHECK(c.gamma0 == 2.5);
  CHECK(c.n_trajectories == 1234);
  CHECK(c.reference == ReferenceKind::BornMarkov);
  CHECK(c.lambda == 1.0);

  const RunConfig s = parse_config("model = spin_bath\nn_spins = 8\nspin_initial = plus_plus\n");
  CHECK(s.model == ModelKind::SpinBath);
  CHECK(s.n_spins == 8);
  CHECK(s.spin_initial == spin::InitialCondition::PlusPlus);
}

TEST_CASE("config errors name the source line") {
  try {
    parse_config("gamma0 = 1\nbogus_key = 3\n", {}, "run.cfg");
    FAIL("expected a configuration error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Configuration);
    CHECK(std::string(e.what()).find("run.cfg:2") != std::string::npos);
    CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("gamma0 = abc\n"), Error);
  CHECK_THROWS_AS(parse_config("gamma0 1\n"), Error);
  RunConfig bad;
  bad.gamma0 = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("grid has n_grid points from 0 to t_max") {
  RunConfig c;
  c.t_max = 5.0;
  c.n_grid = 25;
  const auto g = c.grid();
  REQUIRE(g.size() == 25);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 5.0);
  CHECK(g[6] == doctest::Approx(1.25));
}

TEST_CASE("CSV header, labels and exact round trip") {
  CHECK(entry_labels(ModelKind::Jc) == std::vector<std::string>{"ee", "eg", "ge", "gg"});
  CHECK(entry_labels(ModelKind::SpinBath) == std::vector<std::string>{"++", "+-", "-+", "--"});

  const auto res = simulate(small_spin());
  const CsvTable t = simulation_table(res);
  const std::string text = to_csv(t);
  const std::string header = text.substr(0, text.find('\n'));
  CHECK(header.rfind("t,re_++,im_++,se_re_++,se_im_++,re_+-,", 0) == 0);
  CHECK(header.size() >= 12);
  CHECK(header.substr(header.size() - 10) == ",n,aborted");

  std::istringstream in(text);
  const CsvTable back = read_csv(in);
  CHECK(back.entries == t.entries);
  for (std::size_t e = 0; e < t.entries.size(); ++e)
    for (std::size_t g = 0; g < t.t.size(); ++g) {
      REQUIRE(back.re[e][g] == t.re[e][g]);
      REQUIRE(back.im[e][g] == t.im[e][g]);
      REQUIRE(back.se_re[e][g] == t.se_re[e][g]);
    }
  CHECK(to_csv(back) == text);

  // every trajectory starts at |+><-|
  CHECK(t.re[t.entry_index("+-")][0] == 1.0);
  CHECK(t.se_re[t.entry_index("+-")][0] == 0.0);
  CHECK(t.n[0] == 200);
}

TEST_CASE("malformed CSV lines are reported with their number") {
  std::istringstream in("t,re_ee,im_ee,se_re_ee,se_im_ee,n,aborted\n0,1,0,0,0,5,0\n0.5,1,zz,0,0,5,0\n");
  try {
    read_csv(in, "x.csv");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("x.csv:3") != std::string::npos);
  }
  std::istringstream bad_header("t,re_ee,n\n");
  CHECK_THROWS_AS(read_csv(bad_header), Error);
}

TEST_CASE("runs are reproducible and independent of the worker count") {
  RunConfig c = small_jc();
  c.workers = 1;
  const std::string one = to_csv(simulation_table(simulate(c)));
  CHECK(to_csv(simulation_table(simulate(c))) == one);
  for (unsigned w : {2u, 8u}) {
    c.workers = w;
    CHECK(to_csv(simulation_table(simulate(c))) == one);
  }
  c.workers = 1;
  c.seed = 78;
  CHECK(to_csv(simulation_table(simulate(c))) != one);

  RunConfig single = small_jc();
  single.n_trajectories = 1;
  CHECK(to_csv(simulation_table(simulate(single))) == to_csv(simulation_table(simulate(single))));
}

TEST_CASE("thinning stepper runs end to end") {
  RunConfig c = small_spin();
  c.stepper = Stepper::Thinning;
  const auto res = simulate(c);
  CHECK(res.estimate.n == 200);
  CHECK(res.estimate.mean[0](0, 1) == Complex(1.0, 0.0));
}

TEST_CASE("too many aborted trajectories fail the run") {
  RunConfig c = small_jc();
  c.log_weight_cap = 4.0;
  try {
    simulate(c);
    FAIL("expected an overflow error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Overflow);
  }
  c.max_abort_fraction = 1.0;
  const auto res = simulate(c);
  CHECK(res.estimate.aborted > 0);
  CHECK(res.estimate.n + res.estimate.aborted == c.n_trajectories);
}

TEST_CASE("compare: z scores") {
  CHECK(z_score(1.0, 0.1, 0.6, 0.0) == doctest::Approx(4.0));
  CHECK(z_score(1.0, 0.3, 0.6, 0.0, 0.4) == doctest::Approx(0.8));
  CHECK(z_score(1.0, 0.0, 1.0, 0.0) == 0.0);
  CHECK(std::isinf(z_score(1.0, 0.0, 0.9, 0.0)));

  const CsvTable t = simulation_table(simulate(small_spin()));
  const auto same = compare(t, t);
  CHECK(same.max_abs_z == 0.0);
  CHECK(same.pass);

  CsvTable shifted = t;
  const std::size_t e = t.entry_index("+-");
  shifted.re[e][4] += 4.0 * t.se_re[e][4];
  CompareOptions opt;
  opt.entries = {"+-"};
  opt.max_abs_z = 3.9;
  const auto rep = compare(shifted, t, opt);
  CHECK(rep.max_abs_z == doctest::Approx(4.0 / std::sqrt(2.0)).epsilon(1e-9));
  CHECK(rep.entries == std::vector<std::string>{"+-"});
  CHECK(rep.pass);
  opt.max_abs_z = 2.0;
  CHECK_FALSE(compare(shifted, t, opt).pass);

  // reference tables carry zero SE: a 4 SE shift is z = 4 exactly
  CsvTable ref = t;
  for (auto& col : ref.se_re) std::fill(col.begin(), col.end(), 0.0);
  for (auto& col : ref.se_im) std::fill(col.begin(), col.end(), 0.0);
  ref.re[e][4] -= 4.0 * t.se_re[e][4];
  const auto rz = compare(t, ref, CompareOptions{});
  CHECK(rz.max_abs_z == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("pjm-table output") {
  auto rows = [](int n) {
    std::ostringstream os;
    run_pjm_table(n, os);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "j,p,cumulative");
    std::vector<std::vector<double>> out;
    while (std::getline(in, line)) {
      std::vector<double> r;
      std::istringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) r.push_back(std::stod(cell));
      out.push_back(r);
    }
    return out;
  };
  const auto r1 = rows(1);
  REQUIRE(r1.size() == 1);
  CHECK(r1[0][0] == 0.5);
  CHECK(r1[0][1] == 0.5);
  CHECK(r1[0][2] == 1.0);

  const auto r2 = rows(2);
  REQUIRE(r2.size() == 2);
  CHECK(r2.back()[2] == doctest::Approx(1.0).epsilon(1e-15));

  const auto r1000 = rows(1000);
  CHECK(r1000.size() == 501);
  CHECK(r1000.back()[2] >= 1.0 - 1e-12);
  CHECK_THROWS_AS(rows(0), Error);
}

TEST_CASE("reference tables") {
  RunConfig c;
  c.model = ModelKind::Jc;
  c.reference = ReferenceKind::JcExact;
  const auto r = reference(c);
  CHECK(r.table.re[r.table.entry_index("ee")][0] == 1.0);
  CHECK(r.table.re[r.table.entry_index("gg")][0] == 0.0);

  RunConfig s;
  s.model = ModelKind::SpinBath;
  s.n_spins = 100;
  s.reference = ReferenceKind::SpinBlock;
  const auto sb = reference(s);
  CHECK(sb.discarded_weight <= s.eps_cut);
  CHECK(sb.table.entries == std::vector<std::string>{"+-"});
  CHECK(sb.table.re[sb.table.entry_index("+-")][0] == doctest::Approx(1.0 - sb.discarded_weight));

  RunConfig mismatch = c;
  mismatch.reference = ReferenceKind::SpinBlock;
  CHECK_THROWS_AS(reference(mismatch), Error);
}
