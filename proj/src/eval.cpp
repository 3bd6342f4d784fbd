#include "shapemend/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>
#include <sstream>

#include <json.hpp>

namespace shapemend {

double dsc(const BinaryMask& a, const BinaryMask& b) {
    if (!(a.meta().dims == b.meta().dims))
        throw DimensionMismatch("dsc: mask dims differ");
    const std::size_t na = a.foreground_count();
    const std::size_t nb = b.foreground_count();
    if (na + nb == 0) return 1.0; // agreement on absence
    std::size_t inter = 0;
    const auto& da = a.data();
    const auto& db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) inter += da[i] & db[i];
    return 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb);
}

std::map<std::string, double> case_dsc(const SegmentationCase& pred,
                                       const SegmentationCase& truth) {
    std::map<std::string, double> out;
    std::set<std::string> keys;
    for (const auto& [k, m] : pred.organs()) keys.insert(k);
    for (const auto& [k, m] : truth.organs()) keys.insert(k);
    const BinaryMask empty_pred = BinaryMask::zeros(pred.meta());
    for (const auto& k : keys) {
        const BinaryMask& p = pred.has_organ(k) ? pred.organ(k) : empty_pred;
        const BinaryMask& t = truth.has_organ(k) ? truth.organ(k) : empty_pred;
        out[k] = dsc(p, t);
    }
    return out;
}

namespace {

std::string pct(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", fraction * 100.0);
    // Avoid the "-0.0" rendering.
    if (std::strcmp(buf, "-0.0") == 0) return "0.0";
    return buf;
}

std::string signed_pct(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%+.1f", fraction * 100.0);
    if (std::strcmp(buf, "-0.0") == 0) return "+0.0";
    return buf;
}

struct OrganMean {
    std::string organ;
    double before = 0.0;
    double after = 0.0;
    std::size_t n = 0;
    double delta() const { return after - before; }
};

std::vector<OrganMean> organ_means(const std::vector<CaseReport>& reports) {
    std::map<std::string, OrganMean> acc;
    for (const CaseReport& r : reports) {
        if (r.failed) continue;
        for (const auto& [organ, d] : r.organ_dsc) {
            OrganMean& m = acc[organ];
            m.organ = organ;
            m.before += d.before;
            m.after += d.after;
            ++m.n;
        }
    }
    std::vector<OrganMean> out;
    for (auto& [organ, m] : acc) {
        m.before /= m.n;
        m.after /= m.n;
        out.push_back(m);
    }
    // Table layout: organs by descending gain; ties alphabetical.
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.delta() != b.delta()) return a.delta() > b.delta();
        return a.organ < b.organ;
    });
    return out;
}

} // namespace

std::string render_report(const std::vector<CaseReport>& reports,
                          ReportFormat format) {
    const auto means = organ_means(reports);
    if (format == ReportFormat::Csv) {
        std::ostringstream out;
        out << "case_id,organ,dsc_before_pct,dsc_after_pct,delta_pct\n";
        for (const CaseReport& r : reports) {
            if (r.failed) continue;
            for (const auto& [organ, d] : r.organ_dsc)
                out << r.case_id << ',' << organ << ',' << pct(d.before) << ','
                    << pct(d.after) << ',' << signed_pct(d.delta()) << '\n';
        }
        for (const OrganMean& m : means)
            out << "mean," << m.organ << ',' << pct(m.before) << ','
                << pct(m.after) << ',' << signed_pct(m.delta()) << '\n';
        return out.str();
    }

    nlohmann::ordered_json doc;
    doc["cases"] = nlohmann::ordered_json::array();
    for (const CaseReport& r : reports) {
        nlohmann::ordered_json jc;
        jc["case_id"] = r.case_id;
        if (r.failed) {
            jc["failed"] = true;
            jc["reason"] = r.failure_reason;
        } else {
            nlohmann::ordered_json organs;
            for (const auto& [organ, d] : r.organ_dsc) {
                organs[organ] = {{"dsc_before", d.before},
                                 {"dsc_after", d.after},
                                 {"delta", d.delta()}};
            }
            jc["organs"] = std::move(organs);
            nlohmann::ordered_json steps = nlohmann::ordered_json::array();
            for (const StepRecord& s : r.step_log) {
                steps.push_back({{"step", s.step},
                                 {"organ", s.organ},
                                 {"changed", s.outcome.changed},
                                 {"voxels_removed", s.outcome.voxels_removed},
                                 {"voxels_added", s.outcome.voxels_added},
                                 {"voxels_relabeled", s.outcome.voxels_relabeled},
                                 {"notes", s.outcome.notes}});
            }
            jc["steps"] = std::move(steps);
        }
        doc["cases"].push_back(std::move(jc));
    }
    doc["organ_means"] = nlohmann::ordered_json::array();
    for (const OrganMean& m : means)
        doc["organ_means"].push_back({{"organ", m.organ},
                                      {"dsc_before_pct", pct(m.before)},
                                      {"dsc_after_pct", pct(m.after)},
                                      {"delta_pct", signed_pct(m.delta())}});
    return doc.dump(2) + "\n";
}

} // namespace shapemend
