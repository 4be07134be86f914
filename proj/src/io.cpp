#include "isoreg/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "isoreg/error.hpp"

namespace isoreg {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_field(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

void write_row(std::ostream& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out << ',';
    out << format_number(v);
    first = false;
  }
  out << '\n';
}

}  // namespace

DesignSample read_series(std::istream& in) {
  std::vector<double> t;
  std::vector<double> x;
  std::string line;
  std::size_t row = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++row;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto comma = text.find(',');
    double tv = 0.0;
    double xv = 0.0;
    const bool two_fields = comma != std::string_view::npos && text.find(',', comma + 1) == std::string_view::npos;
    const bool ok = two_fields && parse_field(text.substr(0, comma), tv) && parse_field(text.substr(comma + 1), xv);
    if (!ok) {
      if (!seen_content && two_fields) {
        seen_content = true;
        continue;  // header
      }
      throw ParseError("row " + std::to_string(row) + ": expected two numeric columns 't,x', got '" +
                       std::string(text) + "'");
    }
    if (!std::isfinite(tv) || !std::isfinite(xv)) {
      throw ParseError("row " + std::to_string(row) + ": non-finite value");
    }
    seen_content = true;
    t.push_back(tv);
    x.push_back(xv);
  }
  if (t.empty()) throw ParseError("series has no data rows");
  return DesignSample(std::move(t), std::move(x));
}

DesignSample read_series_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return read_series(in);
}

nlohmann::json fit_to_json(const IsotonicFit& fit) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : fit.blocks) {
    blocks.push_back({{"from", b.start}, {"to", b.end}, {"level", b.level}});
  }
  nlohmann::json doc;
  doc["family"] = fit.family.name();
  doc["scale"] = {{"method", fit.scale.method.name()}, {"value", fit.scale.value}};
  doc["blocks"] = std::move(blocks);
  doc["objective"] = fit.objective;
  return doc;
}

std::string fit_to_json_string(const IsotonicFit& fit) { return fit_to_json(fit).dump(2) + "\n"; }

IsotonicFit fit_from_json(const nlohmann::json& doc, const DesignSample& sample) {
  try {
    const auto family = ScoreFamily::parse(doc.at("family").get<std::string>());
    const auto& scale = doc.at("scale");
    const auto method = ScaleMethod::parse(scale.at("method").get<std::string>());
    const double value = scale.at("value").get<double>();
    std::vector<Block> blocks;
    std::size_t expected = 0;
    for (const auto& b : doc.at("blocks")) {
      Block block{b.at("from").get<std::size_t>(), b.at("to").get<std::size_t>(), b.at("level").get<double>()};
      if (block.start != expected || block.end < block.start || block.end >= sample.size()) {
        throw ParseError("fit JSON blocks do not tile the sample");
      }
      expected = block.end + 1;
      blocks.push_back(block);
    }
    if (expected != sample.size()) throw ParseError("fit JSON blocks do not cover the sample");
    auto out = assemble_fit(sample, std::move(blocks), family,
                            ScaleEstimate{value, method, scale_inputs_used(method, sample.size())});
    out.objective = doc.at("objective").get<double>();
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed fit JSON: ") + e.what());
  }
}

void write_fit_csv(std::ostream& out, const IsotonicFit& fit, const DesignSample& sample) {
  out << "t,x,fitted,residual\n";
  for (std::size_t j = 0; j < sample.size(); ++j) {
    write_row(out, {sample.t(j), sample.x(j), fit.fitted[j], fit.residuals[j]});
  }
}

void write_plot_data(std::ostream& out, const IsotonicFit& fit, const DesignSample& sample) {
  out << "series,t,value\n";
  for (std::size_t j = 0; j < sample.size(); ++j) {
    out << "raw,";
    write_row(out, {sample.t(j), sample.x(j)});
  }
  for (std::size_t b = 0; b < fit.blocks.size(); ++b) {
    const auto& block = fit.blocks[b];
    const double from = sample.t(block.start);
    const double to = b + 1 < fit.blocks.size() ? sample.t(fit.blocks[b + 1].start) : sample.t(block.end);
    out << "step,";
    write_row(out, {from, block.level});
    out << "step,";
    write_row(out, {to, block.level});
  }
}

}  // namespace isoreg
