#pragma once

#include <map>
#include <string>
#include <vector>

#include "shapemend/rules.hpp"
#include "shapemend/volume.hpp"

namespace shapemend {

struct OrganDsc {
    double before = 0.0;
    double after = 0.0;
    double delta() const { return after - before; }
};

struct CaseReport {
    std::string case_id;
    bool failed = false;
    std::string failure_reason;
    std::map<std::string, OrganDsc> organ_dsc;
    std::vector<StepRecord> step_log;
    double seconds = 0.0;
};

enum class ReportFormat { Csv, Json };

/// Dice-Sørensen coefficient 2|a∩b| / (|a|+|b|); 1.0 when both masks are
/// empty. Throws DimensionMismatch.
double dsc(const BinaryMask& a, const BinaryMask& b);

/// Per-organ DSC of `pred` against `truth` for every key present in
/// either case (missing side treated as empty).
std::map<std::string, double> case_dsc(const SegmentationCase& pred,
                                       const SegmentationCase& truth);

/// Per-case rows plus per-organ means (percent, one decimal, signed
/// delta), organs sorted by descending mean delta. Pure function;
/// re-rendering is byte-identical.
std::string render_report(const std::vector<CaseReport>& reports,
                          ReportFormat format);

} // namespace shapemend
