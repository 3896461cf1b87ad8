#include "farmlens/evaluation.hpp"

#include <json.hpp>

#include "farmlens/error.hpp"

namespace farmlens {

namespace {
double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}
} // namespace

double EvaluationReport::precision() const { return ratio(tp, tp + fp); }
double EvaluationReport::recall() const { return ratio(tp, tp + fn); }
double EvaluationReport::accuracy() const { return ratio(tp + tn, total()); }
double EvaluationReport::false_positive_rate() const { return ratio(fp, fp + tn); }

double EvaluationReport::f1() const {
    const double p = precision();
    const double r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

EvaluationReport EvaluationReport::from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
    EvaluationReport r;
    r.tp = tp;
    r.fp = fp;
    r.tn = tn;
    r.fn = fn;
    return r;
}

EvaluationReport EvaluationReport::from_predictions(std::span<const bool> truth, std::span<const bool> predicted) {
    if (truth.size() != predicted.size()) throw InvalidArgument("from_predictions: size mismatch");
    EvaluationReport r;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i]) {
            (predicted[i] ? r.tp : r.fn) += 1;
        } else {
            (predicted[i] ? r.fp : r.tn) += 1;
        }
    }
    return r;
}

std::string EvaluationReport::to_json() const {
    nlohmann::ordered_json j;
    j["tp"] = tp;
    j["fp"] = fp;
    j["tn"] = tn;
    j["fn"] = fn;
    j["precision"] = precision();
    j["recall"] = recall();
    j["accuracy"] = accuracy();
    j["f1"] = f1();
    j["fpr"] = false_positive_rate();
    if (tie_warning) j["tie_warning"] = true;
    return j.dump();
}

} // namespace farmlens
