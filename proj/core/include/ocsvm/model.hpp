#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ocsvm/dataset.hpp"
#include "ocsvm/kernel.hpp"

namespace ocsvm {

// Which trainer produced a model. Affects invariants (the reflected and
// universum trainers guarantee a zero offset) but not the prediction rule.
enum class Provenance {
    nu_single_class,        // margin threshold learned as rho
    reflected_single_class, // reflection reduction, threshold fixed at 1
    universum_single_class, // reflection plus universum penalties, threshold 1
};

std::string to_string(Provenance p);
Provenance parse_provenance(const std::string& text);

// Hyperparameters a trainer consumed, kept with the model for provenance.
// Fields irrelevant to the producing trainer stay at their defaults.
struct HyperParams {
    double nu = 0.5;      // target margin-error / support-vector fraction
    double c = 1.0;       // per-sample training cost
    double c_star = 0.0;  // per-sample universum cost
    double epsilon = 0.0; // universum insensitivity width
    KernelSpec kernel = KernelSpec::linear();
};

// Decision function f(x) = sum_k beta_k * k(base_k, x) + bias, with the
// prediction rule: normal (+1) iff f(x) >= threshold, abnormal (-1)
// otherwise; the boundary itself is normal.
//
// Each coefficient's sign records which reflected copy the underlying dual
// variable lived on; it is already folded into beta, so evaluation uses the
// raw base sample. The constructor prunes |beta| <= 1e-12 entries and
// compacts `base` down to the rows that survive. Immutable once built and
// safe to share across threads.
class OneClassModel {
public:
    OneClassModel(Provenance provenance, HyperParams params, Dataset base,
                  std::vector<SignedIndex> indices, std::vector<double> coefficients,
                  double bias, double threshold);

    Provenance provenance() const { return provenance_; }
    const HyperParams& params() const { return params_; }
    const KernelSpec& kernel() const { return params_.kernel; }
    const Dataset& base() const { return base_; }
    std::span<const SignedIndex> indices() const { return indices_; }
    std::span<const double> coefficients() const { return coefficients_; }
    double bias() const { return bias_; }
    double threshold() const { return threshold_; }
    std::size_t n_support_vectors() const { return coefficients_.size(); }

    double decision_value(const FeatureView& x) const;
    std::vector<double> decision_values(const Dataset& samples) const;

    int predict(const FeatureView& x) const {
        return decision_value(x) >= threshold_ ? +1 : -1;
    }
    std::vector<int> predict(const Dataset& samples) const;

    // Canonical text form: versioned header, kernel, provenance,
    // hyperparameters, base rows, (index, sign, beta) triples, and a trailing
    // content hash. load() rejects unknown versions and hash mismatches.
    void save(std::ostream& out) const;
    static OneClassModel load(std::istream& in);
    void save_file(const std::string& path) const;
    static OneClassModel load_file(const std::string& path);

private:
    Provenance provenance_;
    HyperParams params_;
    Dataset base_;
    std::vector<SignedIndex> indices_;
    std::vector<double> coefficients_;
    double bias_ = 0.0;
    double threshold_ = 1.0;
    std::vector<double> linear_w_; // collapsed weights, linear kernel only
};

} // namespace ocsvm
