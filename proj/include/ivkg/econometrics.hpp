#pragma once

#include <Eigen/Dense>

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ivkg::econ {

enum class Robust { none, hc1 };

Robust parse_robust(const std::string& s);
std::string to_string(Robust r);

// Column-oriented table. Numeric columns store NaN for missing cells;
// categorical columns store the raw label ("" for missing).
class PanelTable {
public:
    struct Column {
        std::string name;
        bool numeric = true;
        std::vector<double> values;
        std::vector<std::string> labels;
    };

    void add_numeric(std::string name, std::vector<double> values);
    void add_categorical(std::string name, std::vector<std::string> labels);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return columns_.size(); }
    bool has(const std::string& name) const;
    const Column& column(const std::string& name) const;  // throws LookupError
    const std::vector<Column>& columns() const noexcept { return columns_; }

private:
    void check_rows(const std::string& name, std::size_t n);
    std::vector<Column> columns_;
    std::size_t rows_ = 0;
};

// A column is numeric when every non-missing cell parses as a number.
// Missing cells: empty, NA, NaN, nan, null, or any non-finite number.
PanelTable read_panel_csv(std::istream& in, const std::string& source = "panel");
PanelTable read_panel_csv_file(const std::string& path);
void write_panel_csv(std::ostream& out, const PanelTable& panel);

struct RegressionSpec {
    std::string outcome;
    std::string endogenous;
    std::vector<std::string> instruments;
    std::vector<std::string> controls;
    std::vector<std::string> fixed_effects;
    Robust robust = Robust::hc1;

    // Names distinct, at least one instrument.
    void validate() const;
};

// Keys: outcome, endogenous, instruments, controls, fixed_effects, robust.
RegressionSpec parse_regression_spec_json(const std::string& text);

struct Design {
    Eigen::VectorXd outcome;
    Eigen::VectorXd endogenous;
    Eigen::MatrixXd instruments;
    Eigen::MatrixXd exog;  // intercept, controls, fixed-effect dummies
    std::vector<std::string> instrument_names;
    std::vector<std::string> exog_names;
    std::size_t n_dropped = 0;
};

// Listwise deletion of rows missing any required value. Factor dummies drop the
// first sorted level of each factor.
Design build_design(const PanelTable& panel, const RegressionSpec& spec);

struct OlsResult {
    Eigen::VectorXd coef;
    Eigen::VectorXd se;
    Eigen::VectorXd t;
    Eigen::VectorXd p;  // two-sided, Student t with n - k df
    Eigen::VectorXd residuals;
    double rss = 0;
    double sigma2 = 0;
    std::size_t n = 0;
    std::size_t k = 0;
};

// QR with column pivoting; throws NumericError naming the first dependent column.
// `names` may be empty (columns are then reported by index).
OlsResult fit_ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, Robust robust,
                  const std::vector<std::string>& names = {});

struct Coefficient {
    std::string name;
    double estimate = 0;
    double se = 0;
    double t = 0;
    double p = 1;
};

struct Statistic {
    double value = 0;
    double p_value = 1;
    int df = 0;
};

struct TslsResult {
    std::vector<Coefficient> first_stage;   // excluded instruments only
    std::vector<Coefficient> first_stage_controls;
    Coefficient second_stage;               // endogenous regressor
    std::vector<Coefficient> controls;      // exogenous columns of the structural equation
    std::size_t n_obs = 0;
    std::size_t n_dropped = 0;
    Statistic anderson_lm;
    double cragg_donald_f = 0;
    double first_stage_f = 0;
    double sigma2 = 0;  // structural residual variance (original A, not fitted)
    Robust robust = Robust::hc1;
    std::vector<std::string> notes;
};

TslsResult fit_2sls(const Eigen::VectorXd& outcome, const Eigen::VectorXd& endogenous,
                    const Eigen::MatrixXd& instruments, const Eigen::MatrixXd& exog, Robust robust,
                    const std::vector<std::string>& instrument_names = {},
                    const std::vector<std::string>& exog_names = {});

TslsResult fit_2sls(const Design& d, Robust robust, const std::string& endogenous_name = "A");

struct CanonicalCorrelation {
    double r2 = 0;
    std::size_t n = 0;
    std::size_t k_exog = 0;
    std::size_t n_instruments = 0;
};

// Squared canonical correlation between A and Z after partialling out X.
CanonicalCorrelation partial_canonical_r2(const Eigen::VectorXd& endogenous, const Eigen::MatrixXd& instruments,
                                          const Eigen::MatrixXd& exog);

Statistic anderson_lm(const Eigen::VectorXd& endogenous, const Eigen::MatrixXd& instruments,
                      const Eigen::MatrixXd& exog);

// +infinity when r2 == 1.
double cragg_donald_f(const Eigen::VectorXd& endogenous, const Eigen::MatrixXd& instruments,
                      const Eigen::MatrixXd& exog);

// Homoskedastic Wald F on the excluded instruments, from restricted vs.
// unrestricted first-stage residual sums of squares.
double first_stage_f(const Eigen::VectorXd& endogenous, const Eigen::MatrixXd& instruments,
                     const Eigen::MatrixXd& exog);

double chi_square_sf(double x, int df);

// "***" p<0.01, "**" p<0.05, "*" p<0.1.
std::string stars(double p);

std::string tsls_to_json(const TslsResult& r, const RegressionSpec* spec = nullptr);
void write_tsls_table(std::ostream& out, const TslsResult& r, const RegressionSpec& spec);

}  // namespace ivkg::econ
