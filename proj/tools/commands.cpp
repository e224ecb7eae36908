#include "commands.hpp"

#include <limits>
#include <optional>

#include "ripkit/concentration.hpp"
#include "ripkit/matrix_io.hpp"
#include "ripkit/recovery.hpp"
#include "ripkit/rip.hpp"
#include "ripkit/transforms.hpp"

namespace ripkit::cli {

namespace {

using u64 = std::uint64_t;

// Seed stream reserved for auxiliary draws (dictionary H, sampled supports)
// so they never coincide with per-trial seeds derive_seed(seed, t).
constexpr u64 kAuxiliaryStream = std::numeric_limits<u64>::max();

EnsembleKind ensemble_of(const ExperimentConfig& c) {
  try {
    return parse_ensemble_kind(c.text("ensemble"));
  } catch (const DomainError& e) {
    throw UsageError(std::string("--ensemble: ") + e.what());
  }
}

std::size_t positive(const ExperimentConfig& c, const std::string& name) {
  const u64 v = c.count(name);
  if (v == 0) throw UsageError("--" + name + ": must be at least 1");
  return static_cast<std::size_t>(v);
}

RipOptions rip_options(const ExperimentConfig& c) {
  RipOptions o;
  o.budget = c.count("budget");
  o.workers = c.workers;
  return o;
}

void exclusive(const ExperimentConfig& c, const std::string& a, const std::string& b) {
  if (c.has(a) && c.has(b))
    throw UsageError("give either --" + a + " or --" + b + ", not both");
}

std::optional<Matrix> phi_from(const ExperimentConfig& c, std::size_t rows, std::size_t cols) {
  exclusive(c, "phi", "ensemble");
  if (c.has("phi")) return load_matrix(c.text("phi"));
  if (c.has("ensemble")) return draw_ensemble({ensemble_of(c), rows, cols, c.seed});
  return std::nullopt;
}

Record rip_record(const std::string& type, const RipReport& r) {
  Record out(type, {"order", "delta", "min_eig", "max_eig", "witness_min", "witness_max",
                    "supports_examined"});
  out.add({u64{r.order}, r.delta, r.min_eigenvalue, r.max_eigenvalue, r.witness_min.to_string(),
           r.witness_max.to_string(), u64{r.supports_examined}});
  return out;
}

void envelope_cells(std::vector<Cell>& row, const EnvelopeReport& e) {
  row.insert(row.end(), {e.lower, e.upper, e.rescale_c, e.delta_effective, e.rip_valid});
}

Payload run_ric(const ExperimentConfig& c) {
  exclusive(c, "matrix", "ensemble");
  Matrix m = [&] {
    if (c.has("matrix")) return load_matrix(c.text("matrix"));
    if (!c.has("ensemble"))
      throw UsageError("missing input, give --matrix or --ensemble with --rows and --cols");
    return draw_ensemble({ensemble_of(c), positive(c, "rows"), positive(c, "cols"), c.seed});
  }();
  const std::size_t k = positive(c, "order");
  const std::string& mode = c.text("mode");
  Payload out;
  if (mode == "exact") {
    const RipReport r = exact_ric(m, k, rip_options(c));
    out.push_back(rip_record("rip", r));
    if (c.has("scale")) {
      const double s = c.real("scale");
      const RipReport scaled = scaled_ric(r, s);
      Record rec("rip_scaled", {"scale", "order", "delta", "min_eig", "max_eig"});
      rec.add({s, u64{scaled.order}, scaled.delta, scaled.min_eigenvalue, scaled.max_eigenvalue});
      out.push_back(std::move(rec));
    }
  } else if (mode == "sample") {
    const RicEstimate e =
        estimate_ric(m, k, positive(c, "trials"), derive_seed(c.seed, kAuxiliaryStream), c.workers);
    Record rec("ric_estimate", {"order", "delta_lower_bound", "trials", "seed"});
    rec.add({u64{e.order}, e.delta_lower_bound, u64{e.trials}, u64{c.seed}});
    out.push_back(std::move(rec));
  } else {
    throw UsageError("--mode: expected exact or sample, got '" + mode + "'");
  }
  return out;
}

Payload run_concentration(const ExperimentConfig& c) {
  const EnsembleKind kind = ensemble_of(c);
  const std::size_t cols = positive(c, "cols");
  const double eps = c.real("epsilon");
  const u64 trials = positive(c, "trials");
  exclusive(c, "sweep", "rows");
  const bool composition = c.has("epsilon1") || c.has("outer-rows");
  if (composition && c.has("sweep"))
    throw UsageError("concentration: --sweep cannot be combined with composition mode");

  std::vector<u64> sweep = c.has("sweep") ? c.counts("sweep") : std::vector<u64>{positive(c, "rows")};
  Payload out;
  Record tail("tail", {"ensemble", "rows", "cols", "epsilon", "c0", "trials", "failures",
                       "empirical_probability", "theoretical_bound", "seed"});
  PlotSeries empirical{"empirical", {}};
  PlotSeries bound{"bound", {}};
  for (u64 n : sweep) {
    if (n == 0) throw UsageError("--sweep: row counts must be at least 1");
    const TailEstimate t =
        estimate_tail({kind, static_cast<std::size_t>(n), cols, 0}, eps, trials, c.seed, c.workers);
    tail.add({std::string(to_string(kind)), u64{t.rows}, u64{cols}, eps, c0_of(eps), t.trials,
              t.failures, t.empirical_probability, t.theoretical_bound, u64{c.seed}});
    empirical.points.emplace_back(static_cast<double>(n), t.empirical_probability);
    bound.points.emplace_back(static_cast<double>(n), t.theoretical_bound);
  }
  out.push_back(std::move(tail));

  if (composition) {
    const std::size_t n = static_cast<std::size_t>(sweep.front());
    const std::size_t m = positive(c, "outer-rows");
    const CompositionTail r = estimate_composition_tail(
        {kind, m, n, 0}, {kind, n, cols, 0}, eps, c.real("epsilon1"), trials, c.seed, c.workers);
    const double limit =
        r.phi_probability() + r.outer_probability() + 3.0 * r.union_standard_error();
    Record rec("composition",
               {"epsilon", "epsilon1", "epsilon3", "epsilon3_below_one", "c0_prime_bound",
                "c0_prime_vacuous", "outer_rows", "rows", "cols", "trials", "phi_failures",
                "outer_failures", "composed_failures", "phi_probability", "outer_probability",
                "composed_probability", "union_standard_error", "union_limit", "within_union"});
    rec.add({r.params.epsilon, r.params.epsilon1, r.params.epsilon3, r.params.epsilon3_below_one,
             r.params.c0_prime_bound, r.params.c0_prime_vacuous, u64{m}, u64{n}, u64{cols},
             r.trials, r.phi_failures, r.outer_failures, r.composed_failures, r.phi_probability(),
             r.outer_probability(), r.composed_probability(), r.union_standard_error(), limit,
             r.composed_probability() <= limit});
    out.push_back(std::move(rec));
  }
  if (c.has("plot")) emit_plot_data({empirical, bound}, c.text("plot"));
  return out;
}

Payload run_transform_left(const ExperimentConfig& c) {
  const Matrix a = load_matrix(c.text("a"));
  const std::size_t k = positive(c, "order");
  const std::optional<Matrix> phi =
      phi_from(c, a.cols(), c.has("ensemble") ? positive(c, "cols") : 0);
  if (phi && c.has("delta"))
    throw UsageError("give either --delta or a phi, not both");
  const double delta = phi ? exact_ric(*phi, k, rip_options(c)).delta : c.real("delta");
  if (phi && delta >= 1.0)
    throw DomainError("transform left: phi has delta_k >= 1, no RIP at order " + std::to_string(k));

  const LeftProductAnalysis r = analyze_left_product(a, delta, k);
  Payload out;
  Record rec("left_product", {"order", "delta_phi", "sigma_1", "sigma_n", "full_column_rank",
                              "failure", "lower", "upper", "rescale_c", "delta_effective",
                              "rip_valid"});
  std::vector<Cell> row{u64{k}, delta, r.gram_spectrum.largest(), r.gram_spectrum.smallest(),
                        r.full_column_rank, std::string(to_string(r.failure))};
  envelope_cells(row, r.envelope);
  rec.add(std::move(row));
  out.push_back(std::move(rec));

  if (phi && r.full_column_rank) {
    const VerificationRecord v = verify_left_envelope(a, *phi, k, rip_options(c));
    Record ver("left_verification",
               {"passed", "lower", "upper", "worst_slack", "witness", "supports_examined"});
    ver.add({v.passed, v.lower, v.upper, v.worst_slack, v.witness.to_string(),
             u64{v.supports_examined}});
    out.push_back(std::move(ver));
  }
  return out;
}

Payload run_transform_right(const ExperimentConfig& c) {
  const Matrix b = load_matrix(c.text("b"));
  const std::size_t k = positive(c, "order");
  const std::optional<Matrix> phi =
      phi_from(c, c.has("ensemble") ? positive(c, "rows") : 0, b.rows());
  if (phi && c.has("delta"))
    throw UsageError("give either --delta or a phi, not both");
  if (phi && phi->cols() != b.rows())
    throw ShapeError("transform right: phi has " + std::to_string(phi->cols()) +
                     " columns but B has " + std::to_string(b.rows()) + " rows");
  const double delta = phi ? exact_ric(*phi, k, rip_options(c)).delta : c.real("delta");
  if (phi && delta >= 1.0)
    throw DomainError("transform right: phi has delta_k >= 1, no RIP at order " +
                      std::to_string(k));

  const RightProductAnalysis r = analyze_right_product(b, delta, k, rip_options(c));
  Payload out;
  Record rec("right_product", {"order", "delta_phi", "lambda_min", "lambda_max", "witness_min",
                               "witness_max", "lower", "upper", "rescale_c", "delta_effective",
                               "rip_valid", "supports_examined"});
  std::vector<Cell> row{u64{k}, delta, r.lambda_min, r.lambda_max, r.witness_min.to_string(),
                        r.witness_max.to_string()};
  envelope_cells(row, r.envelope);
  row.emplace_back(u64{r.supports_examined});
  rec.add(std::move(row));
  out.push_back(std::move(rec));

  exclusive(c, "p", "epsilon");
  std::optional<double> p;
  if (c.has("p")) p = c.real("p");
  if (c.has("epsilon")) {
    const std::size_t n = phi ? phi->rows() : positive(c, "rows");
    p = concentration_probability(n, c.real("epsilon"));
  }
  if (p) {
    const ProbabilityBound u = union_probability(b.cols(), k, *p);
    Record up("union_probability", {"q", "k", "p", "bound", "clamped", "vacuous"});
    up.add({u64{u.q}, u64{u.k}, u.p, u.bound, u.clamped, u.vacuous});
    out.push_back(std::move(up));
  }
  return out;
}

Payload run_dict_bound(const ExperimentConfig& c) {
  exclusive(c, "delta-b", "b");
  exclusive(c, "delta-phi", "phi");
  exclusive(c, "delta-phi", "ensemble");
  const double delta_b = c.has("b") ? exact_ric(load_matrix(c.text("b")), positive(c, "order"),
                                                rip_options(c))
                                          .delta
                                    : c.real("delta-b");
  double delta_phi = 0.0;
  if (c.has("delta-phi")) {
    delta_phi = c.real("delta-phi");
  } else {
    const std::optional<Matrix> phi = phi_from(
        c, c.has("ensemble") ? positive(c, "rows") : 0, c.has("ensemble") ? positive(c, "cols") : 0);
    if (!phi) throw UsageError("missing parameter --delta-phi (or --phi / --ensemble)");
    delta_phi = exact_ric(*phi, positive(c, "order"), rip_options(c)).delta;
  }
  const DictionaryBound d = dictionary_bound(delta_b, delta_phi);
  Record rec("dictionary_bound", {"delta_b", "delta_phi", "bound", "admissible"});
  rec.add({d.delta_b, d.delta_phi, d.bound, d.admissible});
  return {rec};
}

Payload run_dict_experiment(const ExperimentConfig& c) {
  const std::size_t rows = positive(c, "rows");
  const std::size_t cols = positive(c, "cols");
  const std::size_t k = positive(c, "order");
  exclusive(c, "b", "dictionary");
  Matrix b = [&] {
    if (c.has("b")) return load_matrix(c.text("b"));
    if (!c.has("dictionary"))
      throw UsageError("missing dictionary, give --b or --dictionary");
    const std::string& kind = c.text("dictionary");
    if (kind == "identity") return Matrix::identity(cols);
    if (kind == "redundant")
      return concatenated_orthogonal_dictionary(cols, positive(c, "extra"),
                                                derive_seed(c.seed, kAuxiliaryStream));
    throw UsageError("--dictionary: expected identity or redundant, got '" + kind + "'");
  }();
  const DictionaryExperiment e = dictionary_experiment({ensemble_of(c), rows, cols, 0}, b, k,
                                                       positive(c, "trials"), c.seed, rip_options(c));
  Record summary("dictionary_experiment", {"order", "rows", "cols", "dictionary_cols", "delta_b",
                                           "trials", "holds", "pass_fraction", "half_width", "seed"});
  summary.add({u64{k}, u64{rows}, u64{cols}, u64{b.cols()}, e.delta_b, e.trials, e.holds,
               e.pass_fraction, e.half_width, u64{c.seed}});
  Record trials("dictionary_trial", {"trial", "delta_phi", "delta_product", "bound", "holds"});
  for (std::size_t t = 0; t < e.per_trial.size(); ++t) {
    const auto& r = e.per_trial[t];
    trials.add({u64{t}, r.delta_phi, r.delta_product, r.bound, r.holds});
  }
  return {summary, trials};
}

Payload run_recover(const ExperimentConfig& c) {
  const std::size_t rows = positive(c, "rows");
  const std::size_t cols = positive(c, "cols");
  const std::size_t k = static_cast<std::size_t>(c.count("sparsity"));
  SolverConfig solver;
  solver.penalty_parameter = c.real("rho");
  solver.primal_tolerance = solver.dual_tolerance = c.real("tol");
  const u64 iters = positive(c, "max-iters");
  if (iters > static_cast<u64>(std::numeric_limits<int>::max()))
    throw UsageError("--max-iters: too large");
  solver.max_iterations = static_cast<int>(iters);

  const RecoveryStatistics s = run_recovery_trials({ensemble_of(c), rows, cols, 0}, cols, k,
                                                   positive(c, "trials"), c.seed, solver, c.workers);
  Record summary("recovery_summary", {"rows", "cols", "sparsity", "trials", "successes",
                                      "success_rate", "mean_l2_error", "max_l2_error",
                                      "success_tolerance", "seed"});
  summary.add({u64{s.rows}, u64{s.cols}, u64{s.sparsity}, s.trials, s.successes, s.success_rate,
               s.mean_l2_error, s.max_l2_error, kRecoverySuccessTolerance, u64{c.seed}});
  Record trials("recovery_trial",
                {"trial", "success", "l2_error", "sigma_k", "iterations", "residual"});
  for (const auto& t : s.per_trial)
    trials.add({u64{t.trial}, t.success, t.l2_error, t.sigma_k, std::int64_t{t.iterations},
                t.residual});
  return {summary, trials};
}

Payload run_dimension(const ExperimentConfig& c) {
  const std::size_t big_n = positive(c, "N");
  const std::size_t n = positive(c, "n");
  const double c1 = c.real("c1");
  const OrderScan scan = scan_max_order(n, big_n, c1);
  Payload out;
  Record order("max_order", {"n", "N", "c1", "k", "full_order_edge"});
  order.add({u64{n}, u64{big_n}, c1, u64{scan.k}, scan.full_order_edge});
  out.push_back(std::move(order));
  if (c.has("delta")) {
    DimensioningParams p;
    p.big_n = big_n;
    p.k = c.has("k") ? positive(c, "k") : scan.k;
    if (p.k == 0)
      throw DomainError("dimension: no admissible order for these n, N and c1; pass --k");
    p.delta = c.real("delta");
    p.t = c.real("t");
    p.c_cap = c.real("C");
    p.c1 = c1;
    const RowRequirement r = required_rows(p);
    Record rows("required_rows", {"N", "k", "delta", "t", "C", "corrected_bound", "corrected_rows",
                                  "uncorrected_bound", "uncorrected_rows"});
    rows.add({u64{big_n}, u64{p.k}, p.delta, p.t, p.c_cap, r.corrected_bound,
              u64{r.corrected_rows}, r.uncorrected_bound, u64{r.uncorrected_rows}});
    out.push_back(std::move(rows));
  }
  return out;
}

}  // namespace

Payload execute(const ExperimentConfig& config) {
  const std::string& cmd = config.command;
  if (cmd == "ric") return run_ric(config);
  if (cmd == "concentration") return run_concentration(config);
  if (cmd == "transform-left") return run_transform_left(config);
  if (cmd == "transform-right") return run_transform_right(config);
  if (cmd == "dict-bound") return run_dict_bound(config);
  if (cmd == "dict-experiment") return run_dict_experiment(config);
  if (cmd == "recover") return run_recover(config);
  if (cmd == "dimension") return run_dimension(config);
  throw UsageError("unknown command '" + cmd + "'");
}

ReportEnvelope run(const ExperimentConfig& config) {
  ReportEnvelope out;
  out.config_echo = config.echo();
  out.timestamp = utc_timestamp();
  out.payload = execute(config);
  return out;
}

}  // namespace ripkit::cli
