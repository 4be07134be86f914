#pragma once

// Text formats.
//
// Series files: two comma-separated columns (t, x). Lines starting with '#'
// and blank lines are skipped; a first non-comment line that does not parse
// as numbers is taken as a header.
//
// Fit JSON:
//   {"family": "huber:k=0.98",
//    "scale": {"method": "diffm:c=0.7094,b=0.75", "value": 1.23},
//    "blocks": [{"from": 0, "to": 4, "level": 10.5}, ...],
//    "objective": 3.21}
// Block indices are 0-based, inclusive, into the t-sorted sample.

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "isoreg/sample.hpp"
#include "isoreg/solver.hpp"

namespace isoreg {

DesignSample read_series(std::istream& in);
DesignSample read_series_file(const std::filesystem::path& path);

nlohmann::json fit_to_json(const IsotonicFit& fit);
/// Two-space indented JSON followed by a newline.
std::string fit_to_json_string(const IsotonicFit& fit);
IsotonicFit fit_from_json(const nlohmann::json& doc, const DesignSample& sample);

/// Header `t,x,fitted,residual`, one row per observation in t order.
void write_fit_csv(std::ostream& out, const IsotonicFit& fit, const DesignSample& sample);

/// Header `series,t,value`; `raw` rows are the observations, `step` rows the
/// vertices of the fitted right-continuous step function.
void write_plot_data(std::ostream& out, const IsotonicFit& fit, const DesignSample& sample);

}  // namespace isoreg
