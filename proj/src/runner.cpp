#include "pdpsim/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "pdpsim/jc_model.hpp"
#include "pdpsim/reference.hpp"
#include "pdpsim/rng.hpp"
#include "pdpsim/spin_bath.hpp"

namespace pdp {

namespace {

struct EnsembleOutput {
  EnsembleAccumulator accumulator;
  std::uint64_t jumps = 0;
};

template <PairModel M, class InitFn>
EnsembleOutput run_ensemble(const M& model, InitFn init, const std::vector<double>& grid,
                            const EvolveOptions& opt, const RunConfig& cfg) {
  const std::uint64_t total = cfg.n_trajectories;
  const std::uint64_t chunk = cfg.chunk_size;
  const std::size_t n_chunks = static_cast<std::size_t>((total + chunk - 1) / chunk);

  std::vector<EnsembleAccumulator> parts(n_chunks);
  std::vector<std::uint64_t> jumps(n_chunks, 0);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks || failed.load()) return;
      try {
        EnsembleAccumulator acc(grid, M::kSystemDim);
        const std::uint64_t lo = c * chunk;
        const std::uint64_t hi = std::min(total, lo + chunk);
        for (std::uint64_t k = lo; k < hi; ++k) {
          RandomStream init_rng(cfg.seed, k, StreamId::Initial);
          RandomStream s1(cfg.seed, k, StreamId::Branch1);
          RandomStream s2(cfg.seed, k, StreamId::Branch2);
          auto res = evolve_trajectory(model, init(init_rng), grid, opt, s1, s2);
          jumps[c] += res.jumps;
          if (res.aborted) {
            acc.record_abort();
          } else {
            acc.accumulate(res.contributions);
          }
        }
        parts[c] = std::move(acc);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::size_t>(cfg.workers, std::max<std::size_t>(n_chunks, 1)));
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  EnsembleOutput out;
  out.accumulator = merge_ordered(std::move(parts));
  for (auto j : jumps) out.jumps += j;
  return out;
}

jc::JcModel make_jc_model(const RunConfig& cfg) {
  jc::LorentzianSpectrum spec{cfg.gamma0, cfg.lambda};
  return jc::JcModel(spec, jc::discretize(spec, cfg.window_factor, cfg.n_modes, cfg.t_max));
}

spin::SpinBathParams spin_params(const RunConfig& cfg) {
  return spin::SpinBathParams{cfg.n_spins, cfg.a_over_omega0 * cfg.omega0, cfg.omega0};
}

void emit(const RunConfig& cfg, const CsvTable& table, std::ostream& out) {
  if (cfg.output.empty() || cfg.output == "-") {
    write_csv(out, table);
  } else {
    write_csv_file(cfg.output, table);
  }
}

}  // namespace

SimulationResult simulate(const RunConfig& cfg) {
  cfg.validate();
  const std::vector<double> grid = cfg.grid();
  const EvolveOptions opt = cfg.evolve_options();

  SimulationResult result;
  result.labels = entry_labels(cfg.model);
  EnsembleOutput ens;
  if (cfg.model == ModelKind::Jc) {
    jc::JcModel model = make_jc_model(cfg);
    const double bound = model.rate_bound(jc::JcBathState::vacuum_state());
    if (opt.stepper == Stepper::Euler) model.tabulate(euler_midpoints(grid, bound, opt));
    result.rate_bound = bound;
    const jc::JcModel& m = model;
    ens = run_ensemble(m, [&m](RandomStream&) { return m.initial_pair(); }, grid, opt, cfg);
  } else {
    const spin::SpinBathModel model(spin_params(cfg));
    const auto ic = cfg.spin_initial;
    ens = run_ensemble(
        model, [&model, ic](RandomStream& rng) { return model.initial_pair(rng, ic); }, grid, opt,
        cfg);
  }
  result.accumulator = std::move(ens.accumulator);
  result.jumps = ens.jumps;

  const double n_total = static_cast<double>(cfg.n_trajectories);
  const double frac = static_cast<double>(result.accumulator.aborted()) / n_total;
  if (frac > cfg.max_abort_fraction) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%llu of %llu trajectories exceeded log_weight_cap (fraction %.3g > %.3g)",
                  static_cast<unsigned long long>(result.accumulator.aborted()),
                  static_cast<unsigned long long>(cfg.n_trajectories), frac,
                  cfg.max_abort_fraction);
    fail(ErrorKind::Overflow, buf);
  }
  result.estimate = estimate(result.accumulator);
  return result;
}

CsvTable simulation_table(const SimulationResult& result) {
  return table_from_estimate(result.estimate, result.labels);
}

void run_simulate(const RunConfig& cfg, std::ostream& out) {
  emit(cfg, simulation_table(simulate(cfg)), out);
}

ReferenceResult reference(const RunConfig& cfg) {
  cfg.validate();
  const std::vector<double> grid = cfg.grid();
  ReferenceResult res;
  res.table = CsvTable::zeros(entry_labels(cfg.model), grid);
  CsvTable& tab = res.table;

  auto population = [&](const std::vector<double>& p) {
    for (std::size_t g = 0; g < grid.size(); ++g) {
      tab.re[0][g] = p[g];
      tab.re[3][g] = 1.0 - p[g];
    }
  };
  auto wrong_model = [&](const char* needed) {
    fail(ErrorKind::Configuration, std::string("reference ") + to_string(cfg.reference) +
                                       " needs model = " + needed);
  };

  const jc::LorentzianSpectrum spec{cfg.gamma0, cfg.lambda};
  switch (cfg.reference) {
    case ReferenceKind::JcExact:
      if (cfg.model != ModelKind::Jc) wrong_model("jc");
      population(ref::jc_exact(spec, grid).population());
      break;
    case ReferenceKind::BornMarkov:
      if (cfg.model != ModelKind::Jc) wrong_model("jc");
      population(ref::born_markov_p(cfg.gamma0, grid));
      break;
    case ReferenceKind::Tcl2:
      if (cfg.model != ModelKind::Jc) wrong_model("jc");
      population(ref::tcl2_jc_p(spec, grid));
      break;
    case ReferenceKind::SpinBlock: {
      if (cfg.model != ModelKind::SpinBath) wrong_model("spin_bath");
      if (cfg.spin_initial != spin::InitialCondition::PlusMinus)
        fail(ErrorKind::Configuration, "spin_block reference supports spin_initial = plus_minus only");
      const auto sb = ref::spin_block_exact(spin_params(cfg), grid, cfg.eps_cut, cfg.reference_dt);
      // only rho_{+-} is defined by this reference
      tab = CsvTable::zeros({"+-"}, grid);
      for (std::size_t g = 0; g < grid.size(); ++g) {
        tab.re[0][g] = sb.rho_pm[g].real();
        tab.im[0][g] = sb.rho_pm[g].imag();
      }
      res.discarded_weight = sb.discarded_weight;
      break;
    }
    case ReferenceKind::Dense: {
      ref::RkOptions rk;
      rk.dt = cfg.reference_dt;
      std::vector<Eigen::MatrixXcd> rho;
      if (cfg.model == ModelKind::Jc) {
        const auto reservoir = jc::discretize(spec, cfg.window_factor, cfg.n_modes, cfg.t_max);
        const DenseModel dm = ref::dense_jc_model(reservoir);
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(2);
        e(jc::JcModel::kExcited) = 1.0;
        Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(dm.bath_dim());
        vac(0) = 1.0;
        const Eigen::VectorXcd phi = ref::product_state(e, vac);
        const std::vector<ref::PurePair> init{{phi, phi, 1.0}};
        rho = ref::von_neumann_dense(dm, init, grid, rk);
      } else {
        const auto params = spin_params(cfg);
        rho = ref::von_neumann_dense(ref::dense_spin_model(params),
                                     ref::spin_mixed_initial(cfg.n_spins, cfg.spin_initial), grid,
                                     rk);
      }
      for (std::size_t g = 0; g < grid.size(); ++g)
        for (Eigen::Index i = 0; i < 2; ++i)
          for (Eigen::Index j = 0; j < 2; ++j) {
            const auto e = static_cast<std::size_t>(i * 2 + j);
            tab.re[e][g] = rho[g](i, j).real();
            tab.im[e][g] = rho[g](i, j).imag();
          }
      break;
    }
  }
  return res;
}

void run_reference(const RunConfig& cfg, std::ostream& out) {
  emit(cfg, reference(cfg).table, out);
}

double z_score(double sim, double se_sim, double ref, double se_ref, double tol) {
  const double diff = sim - ref;
  const double den = std::sqrt(se_sim * se_sim + se_ref * se_ref + tol * tol);
  if (den > 0.0) return diff / den;
  if (std::abs(diff) <= 1e-12 * std::max(1.0, std::abs(ref))) return 0.0;
  return diff > 0.0 ? std::numeric_limits<double>::infinity()
                    : -std::numeric_limits<double>::infinity();
}

CompareReport compare(const CsvTable& sim, const CsvTable& ref, const CompareOptions& opt) {
  if (sim.t.size() != ref.t.size())
    fail(ErrorKind::GridMismatch, "grids differ in length (" + std::to_string(sim.t.size()) +
                                      " vs " + std::to_string(ref.t.size()) + ")");
  for (std::size_t g = 0; g < sim.t.size(); ++g)
    if (std::abs(sim.t[g] - ref.t[g]) > 1e-12 * std::max(1.0, std::abs(ref.t[g])))
      fail(ErrorKind::GridMismatch, "grids differ at row " + std::to_string(g + 1));

  CompareReport rep;
  rep.t = sim.t;
  std::vector<std::string> wanted = opt.entries;
  if (wanted.empty())
    for (const auto& e : sim.entries)
      if (std::find(ref.entries.begin(), ref.entries.end(), e) != ref.entries.end())
        wanted.push_back(e);
  if (wanted.empty()) fail(ErrorKind::GridMismatch, "no entries in common");

  std::size_t within = 0;
  for (const auto& label : wanted) {
    const std::size_t a = sim.entry_index(label);
    const std::size_t b = ref.entry_index(label);
    std::vector<double> zr(sim.t.size());
    std::vector<double> zi(sim.t.size());
    for (std::size_t g = 0; g < sim.t.size(); ++g) {
      zr[g] = z_score(sim.re[a][g], sim.se_re[a][g], ref.re[b][g], ref.se_re[b][g],
                      opt.reference_tolerance);
      zi[g] = z_score(sim.im[a][g], sim.se_im[a][g], ref.im[b][g], ref.se_im[b][g],
                      opt.reference_tolerance);
      for (double z : {zr[g], zi[g]}) {
        const double az = std::isnan(z) ? std::numeric_limits<double>::infinity() : std::abs(z);
        rep.max_abs_z = std::max(rep.max_abs_z, az);
        within += az <= opt.z_threshold ? 1 : 0;
        ++rep.values;
      }
    }
    rep.entries.push_back(label);
    rep.z_re.push_back(std::move(zr));
    rep.z_im.push_back(std::move(zi));
  }
  rep.fraction_within = static_cast<double>(within) / static_cast<double>(rep.values);
  rep.pass = rep.fraction_within >= opt.required_fraction && rep.max_abs_z <= opt.max_abs_z;
  return rep;
}

void print_report(std::ostream& out, const CompareReport& rep, const CompareOptions& opt) {
  char buf[256];
  out << "entry,t,z_re,z_im\n";
  for (std::size_t e = 0; e < rep.entries.size(); ++e)
    for (std::size_t g = 0; g < rep.t.size(); ++g) {
      std::snprintf(buf, sizeof buf, "%s,%.6g,%.4f,%.4f\n", rep.entries[e].c_str(), rep.t[g],
                    rep.z_re[e][g], rep.z_im[e][g]);
      out << buf;
    }
  std::snprintf(buf, sizeof buf,
                "values=%zu max_abs_z=%.4f fraction_within_%.3g=%.4f required=%.3g result=%s\n",
                rep.values, rep.max_abs_z, opt.z_threshold, rep.fraction_within,
                opt.required_fraction, rep.pass ? "PASS" : "FAIL");
  out << buf;
}

void run_pjm_table(int n_spins, std::ostream& out) {
  const spin::PjmTable table(n_spins);
  out << "j,p,cumulative\n";
  for (std::size_t i = 0; i < table.twice_j.size(); ++i) {
    char jbuf[32];
    std::snprintf(jbuf, sizeof jbuf, "%g", 0.5 * table.twice_j[i]);
    out << jbuf << ',' << format_real(table.probability[i]) << ','
        << format_real(table.cumulative[i]) << '\n';
  }
}

}  // namespace pdp
