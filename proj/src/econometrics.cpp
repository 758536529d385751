#include "ivkg/econometrics.hpp"

#include "ivkg/error.hpp"
#include "ivkg/text_io.hpp"
#include "ivkg/version.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace ivkg::econ {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Robust parse_robust(const std::string& s) {
    if (s == "none" || s == "classical") return Robust::none;
    if (s == "HC1" || s == "hc1") return Robust::hc1;
    throw InvalidArgument("robust must be none or HC1, got '" + s + "'");
}

std::string to_string(Robust r) { return r == Robust::hc1 ? "HC1" : "none"; }

// ---------------------------------------------------------------------------
// PanelTable

void PanelTable::check_rows(const std::string& name, std::size_t n) {
    if (has(name)) throw InvalidArgument("duplicate column '" + name + "'");
    if (!columns_.empty() && n != rows_) throw InvalidArgument("column '" + name + "' has a different row count");
    rows_ = n;
}

void PanelTable::add_numeric(std::string name, std::vector<double> values) {
    check_rows(name, values.size());
    columns_.push_back({std::move(name), true, std::move(values), {}});
}

void PanelTable::add_categorical(std::string name, std::vector<std::string> labels) {
    check_rows(name, labels.size());
    columns_.push_back({std::move(name), false, {}, std::move(labels)});
}

bool PanelTable::has(const std::string& name) const {
    return std::any_of(columns_.begin(), columns_.end(), [&](const Column& c) { return c.name == name; });
}

const PanelTable::Column& PanelTable::column(const std::string& name) const {
    for (const auto& c : columns_)
        if (c.name == name) return c;
    throw LookupError("unknown column '" + name + "'");
}

namespace {

bool is_missing_token(const std::string& s) {
    return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "null" || s == ".";
}

}  // namespace

PanelTable read_panel_csv(std::istream& in, const std::string& source) {
    std::vector<std::string> header;
    std::size_t line_no = 0;
    if (!io::read_csv_record(in, header, line_no)) throw ParseError(source, 1, "empty panel file");
    std::vector<std::vector<std::string>> cells(header.size());
    std::vector<std::string> rec;
    while (io::read_csv_record(in, rec, line_no)) {
        if (rec.size() == 1 && rec[0].empty()) continue;
        if (rec.size() != header.size())
            throw ParseError(source, line_no,
                             "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(rec.size()));
        for (std::size_t j = 0; j < rec.size(); ++j) cells[j].push_back(std::move(rec[j]));
    }

    PanelTable t;
    for (std::size_t j = 0; j < header.size(); ++j) {
        std::vector<double> values;
        values.reserve(cells[j].size());
        bool numeric = true;
        for (const auto& s : cells[j]) {
            if (is_missing_token(s)) {
                values.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            auto v = io::parse_double(s);
            if (!v) {
                numeric = false;
                break;
            }
            values.push_back(std::isfinite(*v) ? *v : std::numeric_limits<double>::quiet_NaN());
        }
        if (numeric) {
            t.add_numeric(header[j], std::move(values));
        } else {
            for (auto& s : cells[j])
                if (is_missing_token(s)) s.clear();
            t.add_categorical(header[j], std::move(cells[j]));
        }
    }
    return t;
}

PanelTable read_panel_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path);
    return read_panel_csv(in, path);
}

void write_panel_csv(std::ostream& out, const PanelTable& panel) {
    std::vector<std::string> rec;
    for (const auto& c : panel.columns()) rec.push_back(c.name);
    io::write_csv_record(out, rec);
    for (std::size_t i = 0; i < panel.rows(); ++i) {
        rec.clear();
        for (const auto& c : panel.columns()) {
            if (c.numeric)
                rec.push_back(std::isnan(c.values[i]) ? std::string("NA") : io::format_double(c.values[i]));
            else
                rec.push_back(c.labels[i]);
        }
        io::write_csv_record(out, rec);
    }
}

// ---------------------------------------------------------------------------
// Spec and design

void RegressionSpec::validate() const {
    if (outcome.empty()) throw InvalidArgument("regression spec needs an outcome");
    if (endogenous.empty()) throw InvalidArgument("regression spec needs an endogenous regressor");
    if (instruments.empty()) throw InvalidArgument("regression spec needs at least one instrument");
    std::set<std::string> seen;
    auto add = [&](const std::string& n) {
        if (!seen.insert(n).second) throw InvalidArgument("column '" + n + "' appears twice in the regression spec");
    };
    add(outcome);
    add(endogenous);
    for (const auto& n : instruments) add(n);
    for (const auto& n : controls) add(n);
    for (const auto& n : fixed_effects) add(n);
}

RegressionSpec parse_regression_spec_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("spec", 0, e.what());
    }
    if (!j.is_object()) throw ParseError("spec", 0, "expected a JSON object");
    RegressionSpec s;
    auto str = [&](const char* key, bool required) -> std::string {
        if (!j.contains(key)) {
            if (required) throw ParseError("spec", 0, std::string("missing key '") + key + "'");
            return {};
        }
        if (!j[key].is_string()) throw ParseError("spec", 0, std::string("'") + key + "' must be a string");
        return j[key].get<std::string>();
    };
    auto list = [&](const char* key) {
        std::vector<std::string> out;
        if (!j.contains(key)) return out;
        const auto& v = j[key];
        if (v.is_string()) return std::vector<std::string>{v.get<std::string>()};
        if (!v.is_array()) throw ParseError("spec", 0, std::string("'") + key + "' must be an array of strings");
        for (const auto& e : v) {
            if (!e.is_string()) throw ParseError("spec", 0, std::string("'") + key + "' must be an array of strings");
            out.push_back(e.get<std::string>());
        }
        return out;
    };
    s.outcome = str("outcome", true);
    s.endogenous = str("endogenous", true);
    s.instruments = list("instruments");
    s.controls = list("controls");
    s.fixed_effects = list("fixed_effects");
    if (auto r = str("robust", false); !r.empty()) s.robust = parse_robust(r);
    s.validate();
    return s;
}

namespace {

const std::vector<double>& numeric_column(const PanelTable& p, const std::string& name) {
    const auto& c = p.column(name);
    if (!c.numeric) throw InvalidArgument("column '" + name + "' is not numeric");
    return c.values;
}

std::vector<std::string> factor_labels(const PanelTable::Column& c) {
    if (!c.numeric) return c.labels;
    std::vector<std::string> out;
    out.reserve(c.values.size());
    for (double v : c.values) out.push_back(std::isnan(v) ? std::string{} : io::format_double(v));
    return out;
}

}  // namespace

Design build_design(const PanelTable& panel, const RegressionSpec& spec) {
    spec.validate();
    std::vector<const std::vector<double>*> numeric;
    numeric.push_back(&numeric_column(panel, spec.outcome));
    numeric.push_back(&numeric_column(panel, spec.endogenous));
    for (const auto& n : spec.instruments) numeric.push_back(&numeric_column(panel, n));
    for (const auto& n : spec.controls) numeric.push_back(&numeric_column(panel, n));
    std::vector<std::vector<std::string>> factors;
    for (const auto& n : spec.fixed_effects) factors.push_back(factor_labels(panel.column(n)));

    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < panel.rows(); ++i) {
        bool ok = true;
        for (const auto* col : numeric) ok = ok && std::isfinite((*col)[i]);
        for (const auto& f : factors) ok = ok && !f[i].empty();
        if (ok) keep.push_back(i);
    }
    if (keep.empty()) throw InvalidArgument("no complete rows left after dropping missing values");

    // Levels are taken from the retained rows so a dropped-out level yields no all-zero dummy.
    std::vector<std::vector<std::string>> levels;
    for (std::size_t f = 0; f < factors.size(); ++f) {
        std::set<std::string> s;
        for (auto i : keep) s.insert(factors[f][i]);
        if (s.size() < 2)
            throw InvalidArgument("fixed effect '" + spec.fixed_effects[f] + "' has a single level");
        levels.emplace_back(s.begin(), s.end());
    }

    Design d;
    const auto n = static_cast<Eigen::Index>(keep.size());
    d.n_dropped = panel.rows() - keep.size();
    d.outcome.resize(n);
    d.endogenous.resize(n);
    d.instruments.resize(n, static_cast<Eigen::Index>(spec.instruments.size()));
    d.instrument_names = spec.instruments;

    d.exog_names.push_back("intercept");
    for (const auto& c : spec.controls) d.exog_names.push_back(c);
    for (std::size_t f = 0; f < levels.size(); ++f)
        for (std::size_t l = 1; l < levels[f].size(); ++l) d.exog_names.push_back(spec.fixed_effects[f] + "=" + levels[f][l]);
    d.exog = MatrixXd::Zero(n, static_cast<Eigen::Index>(d.exog_names.size()));

    for (Eigen::Index r = 0; r < n; ++r) {
        const auto i = keep[static_cast<std::size_t>(r)];
        d.outcome(r) = (*numeric[0])[i];
        d.endogenous(r) = (*numeric[1])[i];
        for (std::size_t j = 0; j < spec.instruments.size(); ++j)
            d.instruments(r, static_cast<Eigen::Index>(j)) = (*numeric[2 + j])[i];
        Eigen::Index col = 0;
        d.exog(r, col++) = 1.0;
        for (std::size_t j = 0; j < spec.controls.size(); ++j)
            d.exog(r, col++) = (*numeric[2 + spec.instruments.size() + j])[i];
        for (std::size_t f = 0; f < levels.size(); ++f) {
            const auto& lv = levels[f];
            const auto pos = std::lower_bound(lv.begin(), lv.end(), factors[f][i]) - lv.begin();
            if (pos > 0) d.exog(r, col + pos - 1) = 1.0;
            col += static_cast<Eigen::Index>(lv.size()) - 1;
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// Least squares

namespace {

std::string column_label(const std::vector<std::string>& names, Eigen::Index j) {
    if (static_cast<std::size_t>(j) < names.size()) return names[static_cast<std::size_t>(j)];
    return "column " + std::to_string(j);
}

// Pivoted QR that refuses rank-deficient input.
Eigen::ColPivHouseholderQR<MatrixXd> checked_qr(const MatrixXd& X, const std::vector<std::string>& names,
                                               const char* what) {
    Eigen::ColPivHouseholderQR<MatrixXd> qr(X);
    if (qr.rank() < X.cols()) {
        const auto bad = qr.colsPermutation().indices()(qr.rank());
        throw NumericError(std::string(what) + " is rank deficient: '" + column_label(names, bad) +
                           "' is collinear with the other columns");
    }
    return qr;
}

// (X'X)^-1 from the R factor: P R^-1 R^-T P'.
MatrixXd bread(const Eigen::ColPivHouseholderQR<MatrixXd>& qr) {
    const auto k = qr.cols();
    const MatrixXd R = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const MatrixXd Rinv = R.triangularView<Eigen::Upper>().solve(MatrixXd::Identity(k, k));
    const MatrixXd inner = Rinv * Rinv.transpose();
    const auto& P = qr.colsPermutation();
    return P * inner * P.transpose();
}

MatrixXd covariance(const MatrixXd& regressors, const MatrixXd& xtx_inv, const VectorXd& resid, Robust robust,
                    double sigma2) {
    const double n = double(regressors.rows());
    const double k = double(regressors.cols());
    if (robust == Robust::none) return sigma2 * xtx_inv;
    const MatrixXd scaled = regressors.array().colwise() * resid.array();
    const MatrixXd meat = scaled.transpose() * scaled;
    return xtx_inv * meat * xtx_inv * (n / (n - k));
}

double t_pvalue(double t, double df) {
    if (!std::isfinite(t)) return 0.0;
    boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

VectorXd residualize(const Eigen::ColPivHouseholderQR<MatrixXd>& qr, const MatrixXd& X, const VectorXd& v) {
    return v - X * qr.solve(v);
}

MatrixXd residualize(const Eigen::ColPivHouseholderQR<MatrixXd>& qr, const MatrixXd& X, const MatrixXd& M) {
    return M - X * qr.solve(M);
}

}  // namespace

OlsResult fit_ols(const VectorXd& y, const MatrixXd& X, Robust robust, const std::vector<std::string>& names) {
    if (y.size() != X.rows()) throw InvalidArgument("y and X row counts differ");
    if (X.rows() <= X.cols()) throw InvalidArgument("need more rows than columns");
    auto qr = checked_qr(X, names, "design");

    OlsResult r;
    r.n = static_cast<std::size_t>(X.rows());
    r.k = static_cast<std::size_t>(X.cols());
    r.coef = qr.solve(y);
    r.residuals = y - X * r.coef;
    r.rss = r.residuals.squaredNorm();
    const double dof = double(r.n - r.k);
    r.sigma2 = r.rss / dof;
    const MatrixXd V = covariance(X, bread(qr), r.residuals, robust, r.sigma2);
    r.se = V.diagonal().cwiseMax(0.0).cwiseSqrt();
    r.t = r.coef.cwiseQuotient(r.se);
    r.p.resize(r.t.size());
    for (Eigen::Index i = 0; i < r.t.size(); ++i) r.p(i) = t_pvalue(r.t(i), dof);
    return r;
}

CanonicalCorrelation partial_canonical_r2(const VectorXd& A, const MatrixXd& Z, const MatrixXd& X) {
    if (A.size() != Z.rows() || A.size() != X.rows()) throw InvalidArgument("A, Z and X row counts differ");
    if (Z.cols() < 1) throw InvalidArgument("need at least one instrument");
    CanonicalCorrelation cc;
    cc.n = static_cast<std::size_t>(A.size());
    cc.k_exog = static_cast<std::size_t>(X.cols());
    cc.n_instruments = static_cast<std::size_t>(Z.cols());

    VectorXd a = A;
    MatrixXd z = Z;
    if (X.cols() > 0) {
        auto qr = checked_qr(X, {}, "exogenous block");
        a = residualize(qr, X, A);
        z = residualize(qr, X, Z);
    }
    const double aa = a.squaredNorm();
    const double scale = std::max(1.0, A.squaredNorm());
    if (aa <= 1e-14 * scale) throw NumericError("endogenous regressor has no variation after partialling out X");
    for (Eigen::Index j = 0; j < z.cols(); ++j)
        if (z.col(j).squaredNorm() <= 1e-14 * std::max(1.0, Z.col(j).squaredNorm()))
            throw NumericError("instrument " + std::to_string(j) + " is collinear with the exogenous regressors");
    auto qz = checked_qr(z, {}, "partialled instruments");
    const VectorXd fitted = z * qz.solve(a);
    // R^2 of residualized A on residualized Z (uncentered; both are already orthogonal to X).
    // A residual at rounding level is an exact fit.
    const double rss = (a - fitted).squaredNorm();
    cc.r2 = rss <= 1e-20 * aa ? 1.0 : std::clamp(fitted.squaredNorm() / aa, 0.0, 1.0);
    return cc;
}

Statistic anderson_lm(const VectorXd& A, const MatrixXd& Z, const MatrixXd& X) {
    const auto cc = partial_canonical_r2(A, Z, X);
    Statistic s;
    s.df = static_cast<int>(cc.n_instruments);
    s.value = double(cc.n) * cc.r2;
    s.p_value = chi_square_sf(s.value, s.df);
    return s;
}

double cragg_donald_f(const VectorXd& A, const MatrixXd& Z, const MatrixXd& X) {
    const auto cc = partial_canonical_r2(A, Z, X);
    if (cc.r2 >= 1.0) return std::numeric_limits<double>::infinity();
    const double L = double(cc.n_instruments);
    return cc.r2 / (1.0 - cc.r2) * (double(cc.n) - double(cc.k_exog) - L) / L;
}

double first_stage_f(const VectorXd& A, const MatrixXd& Z, const MatrixXd& X) {
    MatrixXd W(Z.rows(), Z.cols() + X.cols());
    W << Z, X;
    const auto n = double(A.size());
    const auto L = double(Z.cols());
    const double rss_u = fit_ols(A, W, Robust::none).rss;
    const double rss_r = X.cols() > 0 ? fit_ols(A, X, Robust::none).rss : A.squaredNorm();
    if (rss_u <= 0.0) return std::numeric_limits<double>::infinity();
    return ((rss_r - rss_u) / L) / (rss_u / (n - double(W.cols())));
}

TslsResult fit_2sls(const VectorXd& B, const VectorXd& A, const MatrixXd& Z, const MatrixXd& X, Robust robust,
                    const std::vector<std::string>& z_names_in, const std::vector<std::string>& x_names_in) {
    const auto n = A.size();
    if (B.size() != n || Z.rows() != n || X.rows() != n) throw InvalidArgument("B, A, Z and X row counts differ");
    if (Z.cols() < 1) throw InvalidArgument("need at least one instrument");

    std::vector<std::string> z_names = z_names_in;
    for (auto j = static_cast<Eigen::Index>(z_names.size()); j < Z.cols(); ++j) z_names.push_back("Z" + std::to_string(j));
    std::vector<std::string> x_names = x_names_in;
    for (auto j = static_cast<Eigen::Index>(x_names.size()); j < X.cols(); ++j) x_names.push_back("X" + std::to_string(j));

    MatrixXd W(n, Z.cols() + X.cols());
    W << Z, X;
    std::vector<std::string> w_names = z_names;
    w_names.insert(w_names.end(), x_names.begin(), x_names.end());
    MatrixXd D(n, 1 + X.cols());
    D << A, X;
    if (n <= W.cols() || n <= D.cols()) throw InvalidArgument("need more observations than regressors");

    TslsResult res;
    res.robust = robust;
    res.n_obs = static_cast<std::size_t>(n);

    auto wqr = checked_qr(W, w_names, "instrument matrix [Z X]");

    // First stage: A on [Z X].
    const auto first = fit_ols(A, W, robust, w_names);
    for (Eigen::Index j = 0; j < W.cols(); ++j) {
        Coefficient c{w_names[static_cast<std::size_t>(j)], first.coef(j), first.se(j), first.t(j), first.p(j)};
        (j < Z.cols() ? res.first_stage : res.first_stage_controls).push_back(c);
    }

    // Second stage on the projected regressors P_W D.
    const MatrixXd Dhat = W * wqr.solve(D);
    std::vector<std::string> d_names{"A"};
    d_names.insert(d_names.end(), x_names.begin(), x_names.end());
    auto dqr = checked_qr(Dhat, d_names, "projected regressors");
    const VectorXd beta = dqr.solve(B);
    const VectorXd resid = B - D * beta;  // structural residuals use the original A
    const double dof = double(n - D.cols());
    res.sigma2 = resid.squaredNorm() / dof;
    const MatrixXd V = covariance(Dhat, bread(dqr), resid, robust, res.sigma2);
    auto coef = [&](Eigen::Index j, const std::string& name) {
        const double se = std::sqrt(std::max(0.0, V(j, j)));
        const double t = beta(j) / se;
        return Coefficient{name, beta(j), se, t, t_pvalue(t, dof)};
    };
    res.second_stage = coef(0, "A");
    for (Eigen::Index j = 1; j < D.cols(); ++j) res.controls.push_back(coef(j, x_names[static_cast<std::size_t>(j - 1)]));

    res.anderson_lm = anderson_lm(A, Z, X);
    res.cragg_donald_f = cragg_donald_f(A, Z, X);
    res.first_stage_f = first_stage_f(A, Z, X);
    if (std::isinf(res.cragg_donald_f))
        res.notes.push_back("instruments reproduce the endogenous regressor exactly (r2 = 1); CD F is infinite and "
                            "2SLS equals OLS");
    if (res.cragg_donald_f < 10.0) res.notes.push_back("Cragg-Donald F below 10: weak instrument");
    return res;
}

TslsResult fit_2sls(const Design& d, Robust robust, const std::string& endogenous_name) {
    auto r = fit_2sls(d.outcome, d.endogenous, d.instruments, d.exog, robust, d.instrument_names, d.exog_names);
    r.second_stage.name = endogenous_name;
    r.n_dropped = d.n_dropped;
    return r;
}

double chi_square_sf(double x, int df) {
    if (df < 1) throw InvalidArgument("df must be positive");
    if (std::isnan(x)) throw InvalidArgument("chi-square statistic is NaN");
    if (x < 0) throw InvalidArgument("chi-square statistic must be non-negative");
    if (x == 0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

std::string stars(double p) {
    if (p < 0.01) return "***";
    if (p < 0.05) return "**";
    if (p < 0.1) return "*";
    return "";
}

// ---------------------------------------------------------------------------
// Reports

namespace {

nlohmann::json number(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

nlohmann::json coef_json(const Coefficient& c) {
    return {{"name", c.name}, {"estimate", number(c.estimate)}, {"se", number(c.se)},
            {"t", number(c.t)},  {"p", number(c.p)},                {"stars", stars(c.p)}};
}

}  // namespace

std::string tsls_to_json(const TslsResult& r, const RegressionSpec* spec) {
    nlohmann::json j;
    j["tool_version"] = kToolVersion;
    j["format_version"] = kFormatVersion;
    if (spec) {
        j["spec"] = {{"outcome", spec->outcome},         {"endogenous", spec->endogenous},
                     {"instruments", spec->instruments}, {"controls", spec->controls},
                     {"fixed_effects", spec->fixed_effects}, {"robust", to_string(spec->robust)}};
    }
    j["robust"] = to_string(r.robust);
    j["n_obs"] = r.n_obs;
    j["n_dropped"] = r.n_dropped;
    auto& fs = j["first_stage"];
    fs = nlohmann::json::array();
    for (const auto& c : r.first_stage) fs.push_back(coef_json(c));
    j["second_stage"] = coef_json(r.second_stage);
    auto& ctl = j["controls"];
    ctl = nlohmann::json::array();
    for (const auto& c : r.controls) ctl.push_back(coef_json(c));
    j["anderson_lm"] = {{"statistic", number(r.anderson_lm.value)},
                        {"p_value", number(r.anderson_lm.p_value)},
                        {"df", r.anderson_lm.df}};
    j["cragg_donald_f"] = number(r.cragg_donald_f);
    j["first_stage_f"] = number(r.first_stage_f);
    j["sigma2"] = number(r.sigma2);
    j["notes"] = r.notes;
    return j.dump(2) + "\n";
}

void write_tsls_table(std::ostream& out, const TslsResult& r, const RegressionSpec& spec) {
    auto fmt = [](double v, int prec) {
        std::ostringstream ss;
        ss << std::fixed << std::setprecision(prec) << v;
        return ss.str();
    };
    auto cell = [&](double v, double p) { return fmt(v, 3) + stars(p); };

    std::ostringstream lm;
    lm << fmt(r.anderson_lm.value, 2) << stars(r.anderson_lm.p_value);
    const std::string cd = std::isinf(r.cragg_donald_f) ? "inf" : fmt(r.cragg_donald_f, 2);

    out << std::left << std::setw(26) << "Stage" << std::setw(30) << "Variable" << std::right << std::setw(14)
        << "Coefficient" << std::setw(10) << "t-value" << std::setw(14) << "Anderson LM" << std::setw(12) << "CD F"
        << '\n';
    out << std::string(106, '-') << '\n';
    for (std::size_t i = 0; i < r.first_stage.size(); ++i) {
        const auto& c = r.first_stage[i];
        out << std::left << std::setw(26) << (i == 0 ? "1st: Z -> A" : "") << std::setw(30)
            << (c.name + " -> " + spec.endogenous) << std::right << std::setw(14) << cell(c.estimate, c.p)
            << std::setw(10) << fmt(c.t, 2) << std::setw(14) << (i == 0 ? lm.str() : "") << std::setw(12)
            << (i == 0 ? cd : "") << '\n';
    }
    const auto& s = r.second_stage;
    out << std::left << std::setw(26) << "2nd: A -> B" << std::setw(30) << (spec.endogenous + " -> " + spec.outcome)
        << std::right << std::setw(14) << cell(s.estimate, s.p) << std::setw(10) << fmt(s.t, 2) << '\n';
    out << std::string(106, '-') << '\n';
    out << "N = " << r.n_obs << " (dropped " << r.n_dropped << ")";
    if (!spec.controls.empty()) {
        out << "; controls:";
        for (const auto& c : spec.controls) out << ' ' << c;
    }
    if (!spec.fixed_effects.empty()) {
        out << "; fixed effects:";
        for (const auto& f : spec.fixed_effects) out << ' ' << f;
    }
    out << '\n';
    out << (r.robust == Robust::hc1 ? "Robust (HC1)" : "Classical") << " t-statistics. *** p<0.01, ** p<0.05, * p<0.1\n";
    out << "Anderson LM: canonical correlation LM statistic (df " << r.anderson_lm.df
        << "); CD F: Cragg-Donald Wald F statistic\n";
    for (const auto& n : r.notes) out << "note: " << n << '\n';
}

}  // namespace ivkg::econ
