#include "causelab/deconfounder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "causelab/linalg.hpp"
#include "causelab/rng.hpp"

namespace causelab {

namespace {

struct CauseBlock {
  Eigen::MatrixXd a;
  Eigen::VectorXd y;
  Eigen::MatrixXd u;  // 0 columns when unused
  std::vector<std::string> cause_names;
  std::vector<std::string> u_names;
  std::string outcome_name;
  bool restricted = false;  // rows dropped relative to the incoming table
};

// Usable rows are those with the outcome observed; cause columns are complete
// by construction.
CauseBlock outcome_rows(const Dataset& data, bool include_u_sng) {
  CauseBlock blk;
  blk.cause_names = data.names_with_role(NodeRole::Cause);
  if (include_u_sng) blk.u_names = data.names_with_role(NodeRole::SingleCauseConfounder);
  const auto y_cols = data.cols_with_role(NodeRole::Outcome);
  if (y_cols.size() != 1) raise(ErrorCode::InvalidSpec, "dataset needs exactly one outcome column");
  blk.outcome_name = data.columns[static_cast<std::size_t>(y_cols[0])].name;

  std::vector<Eigen::Index> rows;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const double y = data.values(static_cast<Eigen::Index>(r), y_cols[0]);
    if (data.selected[r] && !std::isnan(y)) rows.push_back(static_cast<Eigen::Index>(r));
  }
  if (rows.empty()) raise(ErrorCode::EmptySample, "no rows with an observed outcome");
  blk.restricted = rows.size() < data.rows();

  const Eigen::MatrixXd a_full = data.matrix_for(blk.cause_names);
  const Eigen::MatrixXd u_full = data.matrix_for(blk.u_names);
  blk.a.resize(static_cast<Eigen::Index>(rows.size()), a_full.cols());
  blk.u.resize(static_cast<Eigen::Index>(rows.size()), u_full.cols());
  blk.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    blk.a.row(static_cast<Eigen::Index>(i)) = a_full.row(rows[i]);
    blk.u.row(static_cast<Eigen::Index>(i)) = u_full.row(rows[i]);
    blk.y(static_cast<Eigen::Index>(i)) = data.values(rows[i], y_cols[0]);
  }
  return blk;
}

double mean_log_likelihood(const Eigen::MatrixXd& w, double s2, const Eigen::MatrixXd& s) {
  const auto m = w.rows();
  const Eigen::MatrixXd c =
      w * w.transpose() + s2 * Eigen::MatrixXd::Identity(m, m);
  const Eigen::LLT<Eigen::MatrixXd> llt(c);
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) logdet += 2.0 * std::log(llt.matrixLLT()(i, i));
  const double tr = llt.solve(s).trace();
  return -0.5 * (static_cast<double>(m) * std::log(2.0 * std::numbers::pi) + logdet + tr);
}

void check_query_names(const std::vector<std::string>& causes, const InterventionQuery& q) {
  if (q.set_to.empty()) raise(ErrorCode::InvalidQuery, "query pins no causes");
  std::set<std::string> seen;
  for (const auto& [name, value] : q.set_to) {
    if (std::find(causes.begin(), causes.end(), name) == causes.end())
      raise(ErrorCode::InvalidQuery, "'" + name + "' is not a fitted cause");
    if (!seen.insert(name).second) raise(ErrorCode::InvalidQuery, "'" + name + "' pinned twice");
    if (!std::isfinite(value)) raise(ErrorCode::InvalidQuery, "value for '" + name + "' is not finite");
  }
  if (q.set_to.size() >= causes.size())
    raise(ErrorCode::InvalidQuery, "at least one cause must stay free");
}

}  // namespace

SubstituteModel fit_substitute(const Dataset& data, int k) {
  const std::vector<std::string> causes = data.names_with_role(NodeRole::Cause);
  const auto m = static_cast<Eigen::Index>(causes.size());
  if (k < 1) raise(ErrorCode::InvalidQuery, "latent dimension must be at least 1");
  if (k >= m) raise(ErrorCode::KTooLarge, "k = " + std::to_string(k) + " with only " +
                                              std::to_string(m) + " causes");
  const Eigen::MatrixXd a = data.matrix_for(causes);
  const auto n = a.rows();
  if (n < 10 * m)
    raise(ErrorCode::Underdetermined,
          std::to_string(n) + " rows cannot pin down " + std::to_string(m) + " causes (need 10m)");

  SubstituteModel model;
  model.cause_names = causes;
  model.k = k;
  model.fitted_on_selected_rows = data.selected_rows_only;
  model.mean = a.colwise().mean();
  const Eigen::MatrixXd centered = a.rowwise() - model.mean.transpose();
  const Eigen::MatrixXd s = centered.transpose() * centered / static_cast<double>(n);

  Rng init(0xC0FFEEull);
  Eigen::MatrixXd w(m, k);
  const double scale = 0.01 * std::sqrt(s.trace() / static_cast<double>(m));
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < k; ++j) w(i, j) = scale * init.normal();
  double s2 = 0.5 * s.trace() / static_cast<double>(m);

  const Eigen::MatrixXd eye_k = Eigen::MatrixXd::Identity(k, k);
  double ll_prev = 0.0;
  bool have_prev = false;
  for (int it = 0; it < kEmMaxIters; ++it) {
    const Eigen::MatrixXd m_mat = w.transpose() * w + s2 * eye_k;
    const Eigen::MatrixXd m_inv = m_mat.llt().solve(eye_k);
    const Eigen::MatrixXd sw = s * w;
    const Eigen::MatrixXd w_new =
        sw * (s2 * eye_k + m_inv * w.transpose() * sw).llt().solve(eye_k);
    const double s2_new = (s - sw * m_inv * w_new.transpose()).trace() / static_cast<double>(m);
    w = w_new;
    s2 = s2_new;
    const double ll = mean_log_likelihood(w, s2, s);
    model.fit_log.push_back(ll);
    if (have_prev && std::abs(ll - ll_prev) <= kEmRelTol * std::abs(ll_prev)) break;
    ll_prev = ll;
    have_prev = true;
  }
  model.loadings = w;
  model.noise_var = s2;
  return model;
}

GaussianDist posterior_z(const SubstituteModel& model, const Eigen::VectorXd& a) {
  if (a.size() != model.loadings.rows())
    raise(ErrorCode::InvalidQuery, "cause vector length does not match the fitted model");
  const auto k = model.k;
  const Eigen::MatrixXd m_mat = model.loadings.transpose() * model.loadings +
                                model.noise_var * Eigen::MatrixXd::Identity(k, k);
  const Eigen::LLT<Eigen::MatrixXd> llt(m_mat);
  GaussianDist post;
  post.mean = llt.solve(model.loadings.transpose() * (a - model.mean));
  post.cov = model.noise_var * llt.solve(Eigen::MatrixXd::Identity(k, k));
  for (int j = 0; j < k; ++j) post.labels.push_back("z" + std::to_string(j + 1));
  return post;
}

Eigen::MatrixXd posterior_mean_z(const SubstituteModel& model, const Eigen::MatrixXd& a) {
  const auto k = model.k;
  const Eigen::MatrixXd m_mat = model.loadings.transpose() * model.loadings +
                                model.noise_var * Eigen::MatrixXd::Identity(k, k);
  return (a.rowwise() - model.mean.transpose()) * model.loadings *
         m_mat.llt().solve(Eigen::MatrixXd::Identity(k, k));
}

namespace {

// Mean over rows of the summed per-cause conditional log-likelihood
// log p(a_j | a_{-j}) under N(mu, C). With P = C^-1 the conditional variance
// of coordinate j is 1/P_jj and the deviation from its conditional mean is
// (P (a - mu))_j / P_jj.
double conditional_stat(const Eigen::MatrixXd& x, const Eigen::VectorXd& mu,
                        const Eigen::MatrixXd& prec) {
  const Eigen::MatrixXd centered = x.rowwise() - mu.transpose();
  const Eigen::MatrixXd r = centered * prec;
  double total = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double pjj = prec(j, j);
    const double v = 1.0 / pjj;
    const double sq = (r.col(j) / pjj).squaredNorm();
    total += -0.5 * std::log(2.0 * std::numbers::pi * v) * static_cast<double>(x.rows()) -
             0.5 * sq / v;
  }
  return total / static_cast<double>(x.rows());
}

}  // namespace

CheckReport check_factor(const SubstituteModel& model, const Dataset& holdout, int replicates,
                         std::uint64_t seed) {
  CheckReport rep;
  rep.replicates = replicates;
  const Eigen::MatrixXd a = holdout.rows() > 0
                                ? holdout.matrix_for(model.cause_names)
                                : Eigen::MatrixXd(0, model.loadings.rows());
  if (a.rows() == 0 || replicates < 1) return rep;  // Inconclusive

  const auto m = model.loadings.rows();
  const Eigen::MatrixXd c = model.loadings * model.loadings.transpose() +
                            model.noise_var * Eigen::MatrixXd::Identity(m, m);
  const Eigen::MatrixXd prec = c.llt().solve(Eigen::MatrixXd::Identity(m, m));
  rep.stat_observed = conditional_stat(a, model.mean, prec);

  Rng rng(seed);
  const double sd = std::sqrt(model.noise_var);
  Eigen::MatrixXd rep_data(a.rows(), m);
  Eigen::VectorXd z(model.k);
  int below = 0;
  double rep_sum = 0.0;
  for (int b = 0; b < replicates; ++b) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (int j = 0; j < model.k; ++j) z(j) = rng.normal();
      rep_data.row(i) = (model.mean + model.loadings * z).transpose();
      for (Eigen::Index j = 0; j < m; ++j) rep_data(i, j) += sd * rng.normal();
    }
    const double t = conditional_stat(rep_data, model.mean, prec);
    rep_sum += t;
    if (t <= rep.stat_observed) ++below;
  }
  rep.stat_replicate_mean = rep_sum / replicates;
  rep.score = static_cast<double>(below) / replicates;
  rep.status = (rep.score >= 0.01 && rep.score <= 0.99) ? CheckReport::Status::Pass
                                                        : CheckReport::Status::Fail;
  return rep;
}

OutcomeModel fit_outcome(const Dataset& data, const SubstituteModel& substitute,
                         bool include_u_sng) {
  const CauseBlock blk = outcome_rows(data, include_u_sng);
  if (blk.cause_names != substitute.cause_names)
    raise(ErrorCode::IncompatibleModels, "dataset causes do not match the substitute model");
  const auto n = blk.a.rows();
  const auto m = blk.a.cols();
  const auto du = blk.u.cols();
  const int k = substitute.k;

  // The design [1, causes, u_sng] must have full column rank; the posterior
  // mean block is excluded here because it is linear in the causes and thus
  // singular with them by construction, not by accident.
  {
    Eigen::MatrixXd d(n, 1 + m + du);
    d.col(0).setOnes();
    d.middleCols(1, m) = blk.a;
    if (du > 0) d.rightCols(du) = blk.u;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(d, Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= kPinvRcond * sv(0)) {
      const Eigen::VectorXd dir = svd.matrixV().col(sv.size() - 1);
      Eigen::Index worst = 0;
      dir.cwiseAbs().maxCoeff(&worst);
      std::string label = worst == 0 ? "intercept"
                          : worst <= m
                              ? blk.cause_names[static_cast<std::size_t>(worst - 1)]
                              : blk.u_names[static_cast<std::size_t>(worst - 1 - m)];
      raise(ErrorCode::RankDeficientDesign,
            "causes and single-cause confounders are collinear (dominant direction on '" +
                label + "')");
    }
  }

  const Eigen::MatrixXd g = posterior_mean_z(substitute, blk.a);
  Eigen::MatrixXd f1(n, 1 + k + du);
  f1.col(0).setOnes();
  f1.middleCols(1, k) = g;
  if (du > 0) f1.rightCols(du) = blk.u;

  // Confounder-first attribution: project Y and the causes off [1, z-mean,
  // u_sng], fit the cause block on the residuals (minimum-norm), then let the
  // confounder block absorb what the causes leave.
  Eigen::MatrixXd ya(n, 1 + m);
  ya.col(0) = blk.y;
  ya.rightCols(m) = blk.a;
  const Eigen::MatrixXd resid = ya - f1 * pinv_solve(f1, ya);
  const Eigen::VectorXd b_a = pinv_solve(resid.rightCols(m), resid.col(0));
  const Eigen::VectorXd coef2 = pinv_solve(f1, blk.y - blk.a * b_a);

  OutcomeModel out;
  out.cause_names = blk.cause_names;
  out.u_sng_names = blk.u_names;
  out.outcome_name = blk.outcome_name;
  out.fitted_on_selected = blk.restricted || data.selected_rows_only;
  out.intercept = coef2(0);
  out.cause_coef = b_a;
  out.z_coef = coef2.segment(1, k);
  out.u_sng_coef = du > 0 ? coef2.tail(du).eval() : Eigen::VectorXd(0);

  Eigen::VectorXd fitted = Eigen::VectorXd::Constant(n, out.intercept);
  fitted += blk.a * out.cause_coef + g * out.z_coef;
  if (du > 0) fitted += blk.u * out.u_sng_coef;
  const double rss = (blk.y - fitted).squaredNorm();
  const auto p = 1 + m + k + du;
  out.residual_var = n > p ? rss / static_cast<double>(n - p) : 0.0;
  return out;
}

namespace {

DeconfounderEstimate integrate_head(const SubstituteModel& sub, const OutcomeModel& out,
                                    const Eigen::VectorXd& u_mean, const Eigen::MatrixXd& u_cov,
                                    const InterventionQuery& q, const Integration& integration) {
  if (out.cause_names != sub.cause_names)
    raise(ErrorCode::IncompatibleModels, "outcome head and substitute disagree on the causes");
  check_query_names(sub.cause_names, q);
  const auto m = static_cast<Eigen::Index>(sub.cause_names.size());
  const int k = sub.k;
  const auto du = out.u_sng_coef.size();

  Eigen::VectorXd pinned = Eigen::VectorXd::Zero(m);
  std::vector<char> is_pinned(static_cast<std::size_t>(m), 0);
  for (const auto& [name, value] : q.set_to) {
    const auto it = std::find(sub.cause_names.begin(), sub.cause_names.end(), name);
    const auto i = static_cast<Eigen::Index>(it - sub.cause_names.begin());
    pinned(i) = value;
    is_pinned[static_cast<std::size_t>(i)] = 1;
  }
  std::vector<Eigen::Index> free;
  for (Eigen::Index i = 0; i < m; ++i)
    if (!is_pinned[static_cast<std::size_t>(i)]) free.push_back(i);
  const auto nf = static_cast<Eigen::Index>(free.size());

  Eigen::MatrixXd w_free(nf, k);
  Eigen::VectorXd mu_free(nf), b_free(nf);
  for (Eigen::Index i = 0; i < nf; ++i) {
    w_free.row(i) = sub.loadings.row(free[static_cast<std::size_t>(i)]);
    mu_free(i) = sub.mean(free[static_cast<std::size_t>(i)]);
    b_free(i) = out.cause_coef(free[static_cast<std::size_t>(i)]);
  }

  DeconfounderEstimate est;
  est.query = q;
  est.proxy_rank.required_rank = k;
  est.proxy_rank.rank = svd_rank(w_free, kRankRtol, &est.proxy_rank.min_singular_value);

  double pinned_term = out.intercept;
  for (const auto& [name, value] : q.set_to) {
    const auto it = std::find(sub.cause_names.begin(), sub.cause_names.end(), name);
    pinned_term += out.cause_coef(static_cast<Eigen::Index>(it - sub.cause_names.begin())) * value;
  }

  if (integration.mode == Integration::Mode::Analytic) {
    est.mean = pinned_term + b_free.dot(mu_free) + (du > 0 ? out.u_sng_coef.dot(u_mean) : 0.0);
    // cov of (free causes, z) under the substitute: [WW'+s2 I, W; W', I]
    double var = b_free.dot((w_free * w_free.transpose()).selfadjointView<Eigen::Lower>() * b_free);
    var += sub.noise_var * b_free.squaredNorm();
    var += 2.0 * b_free.dot(w_free * out.z_coef);
    var += out.z_coef.squaredNorm();
    if (du > 0) var += out.u_sng_coef.dot(u_cov * out.u_sng_coef);
    est.variance = var + out.residual_var;
    return est;
  }

  if (integration.n == 0) raise(ErrorCode::EmptySample, "mc integration needs n > 0");
  Rng rng(hash_combine(integration.seed, query_hash(q)));
  Eigen::MatrixXd u_chol(du, du);
  if (du > 0) u_chol = Eigen::MatrixXd(u_cov.llt().matrixL());
  Eigen::VectorXd z(k), e(nf), uz(du);
  const double sd = std::sqrt(sub.noise_var);
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t it = 0; it < integration.n; ++it) {
    for (int j = 0; j < k; ++j) z(j) = rng.normal();
    for (Eigen::Index j = 0; j < nf; ++j) e(j) = rng.normal();
    double v = pinned_term + b_free.dot(mu_free + w_free * z + sd * e) + out.z_coef.dot(z);
    if (du > 0) {
      for (Eigen::Index j = 0; j < du; ++j) uz(j) = rng.normal();
      v += out.u_sng_coef.dot(u_mean + u_chol * uz);
    }
    sum += v;
    sumsq += v * v;
  }
  const auto n = static_cast<double>(integration.n);
  est.n_integration = integration.n;
  est.mean = sum / n;
  const double head_var = std::max(0.0, sumsq / n - est.mean * est.mean);
  est.variance = head_var + out.residual_var;
  est.mc_se = integration.n > 1 ? std::sqrt(head_var / (n - 1.0)) : 0.0;
  return est;
}

}  // namespace

DeconfounderEstimate estimate_do(const SubstituteModel& substitute, const OutcomeModel& outcome,
                                 const InterventionQuery& q, const Integration& integration) {
  if (outcome.u_sng_coef.size() > 0)
    raise(ErrorCode::IncompatibleModels,
          "outcome head carries single-cause confounder terms; use the selection-aware estimator");
  return integrate_head(substitute, outcome, Eigen::VectorXd(0), Eigen::MatrixXd(0, 0), q,
                        integration);
}

DeconfounderEstimate estimate_do_selected(const SubstituteModel& substitute_unbiased,
                                          const OutcomeModel& outcome_selected,
                                          const GaussianDist& u_sng_marginal,
                                          const InterventionQuery& q,
                                          const Integration& integration) {
  if (substitute_unbiased.fitted_on_selected_rows)
    raise(ErrorCode::WrongViewProvenance,
          "substitute model was fitted on selected rows; it needs the non-selection-biased causes");
  if (!outcome_selected.fitted_on_selected)
    raise(ErrorCode::WrongViewProvenance,
          "outcome head was fitted on the full view; it needs the selected view");
  const GaussianDist u = outcome_selected.u_sng_names.empty()
                             ? GaussianDist{}
                             : marginal(u_sng_marginal, outcome_selected.u_sng_names);
  return integrate_head(substitute_unbiased, outcome_selected, u.mean, u.cov, q, integration);
}

double naive_conditional_mean(const Dataset& data, const InterventionQuery& q) {
  const CauseBlock blk = outcome_rows(data, false);
  check_query_names(blk.cause_names, q);
  const auto n = blk.a.rows();
  const auto m = blk.a.cols();
  Eigen::MatrixXd d(n, 1 + m);
  d.col(0).setOnes();
  d.rightCols(m) = blk.a;
  const Eigen::VectorXd c = pinv_solve(d, blk.y);
  double mean = c(0);
  std::set<std::string> pinned_names;
  for (const auto& [name, value] : q.set_to) pinned_names.insert(name);
  for (Eigen::Index i = 0; i < m; ++i) {
    const std::string& name = blk.cause_names[static_cast<std::size_t>(i)];
    const auto it =
        std::find_if(q.set_to.begin(), q.set_to.end(),
                     [&](const auto& kv) { return kv.first == name; });
    mean += c(1 + i) * (it != q.set_to.end() ? it->second : blk.a.col(i).mean());
  }
  return mean;
}

}  // namespace causelab
