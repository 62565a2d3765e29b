#include "tnrisk/dataset.hpp"

#include "tnrisk/csv.hpp"
#include "tnrisk/error.hpp"

#include <cmath>
#include <set>

#include <fmt/format.h>

namespace tnrisk {

namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kCountryHeader = {
    "code",     "name",    "region",  "population", "gdp_usd", "sec_fraction", "muslim_pop",
    "sigma_n",  "sigma_r", "sigma_s", "sigma_o",    "is_oecd", "is_target"};
const std::vector<std::string> kPairHeader = {"origin", "dest", "value"};
const std::vector<std::string> kSupplyHeader = {"code", "supply"};
const std::vector<std::string> kInterceptionHeader = {"code", "cost"};
const std::vector<std::string> kYieldHeader = {"code", "yield"};
const std::vector<std::string> kBarrierHeader = {"origin", "dest", "cost"};

constexpr double kSurveySlack = 1e-9;
constexpr double kDistanceRelTol = 1e-6;

/// Row-level parsing helpers that report the offending line.
class RowReader {
 public:
  RowReader(const fs::path& source, const CsvRow& row, std::size_t width)
      : source_(source), row_(row) {
    if (row.cells.size() != width) {
      fail(fmt::format("expected {} cells, found {}", width, row.cells.size()));
    }
  }

  [[noreturn]] void fail(const std::string& what, ErrorKind kind = ErrorKind::MalformedRow) const {
    throw Error(kind, fmt::format("{}:{}: {}", source_.string(), row_.line, what), row_.line);
  }

  const std::string& cell(std::size_t i) const { return row_.cells[i]; }

  CountryCode code(std::size_t i) const {
    if (!CountryCode::is_valid(cell(i))) fail(fmt::format("invalid country code '{}'", cell(i)));
    return CountryCode(cell(i));
  }

  double number(std::size_t i, const char* field) const {
    const auto v = parse_finite(cell(i));
    if (!v) fail(fmt::format("field '{}' is not a number: '{}'", field, cell(i)));
    return *v;
  }

  std::optional<double> optional_number(std::size_t i, const char* field) const {
    if (cell(i).empty()) return std::nullopt;
    return number(i, field);
  }

  bool flag(std::size_t i, const char* field) const {
    const auto& c = cell(i);
    if (c == "1" || c == "true") return true;
    if (c == "0" || c == "false" || c.empty()) return false;
    fail(fmt::format("field '{}' must be 0 or 1, found '{}'", field, c));
  }

  std::size_t line() const { return row_.line; }

 private:
  const fs::path& source_;
  const CsvRow& row_;
};

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

CodeMap load_code_values(const fs::path& path, const std::vector<std::string>& header,
                         bool allow_negative) {
  const auto doc = read_csv(path);
  require_header(doc, header, path);
  CodeMap out;
  for (const auto& row : doc.rows) {
    RowReader r(path, row, 2);
    const auto code = r.code(0);
    const double value = r.number(1, header[1].c_str());
    if (!allow_negative && value < 0.0) {
      r.fail(fmt::format("negative {} for {}", header[1], code.str()), ErrorKind::NegativeValue);
    }
    if (!out.emplace(code, value).second) {
      r.fail("duplicate code " + code.str(), ErrorKind::DuplicateCode);
    }
  }
  return out;
}

std::string format_code_values(const CodeMap& values, const std::vector<std::string>& header) {
  std::string out = csv_line(header);
  for (const auto& [code, v] : values) out += csv_line({code.str(), format_number(v)});
  return out;
}

}  // namespace

std::optional<double> PairTable::find(const CountryCode& origin, const CountryCode& dest) const {
  const auto it = entries_.find({origin, dest});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void PairTable::insert(const CountryCode& origin, const CountryCode& dest, double value) {
  entries_[{origin, dest}] = value;
}

const CountryRecord* DataBundle::find(const CountryCode& code) const {
  for (const auto& c : countries) {
    if (c.code == code) return &c;
  }
  return nullptr;
}

std::vector<CountryRecord> load_country_table(const fs::path& path) {
  const auto doc = read_csv(path);
  require_header(doc, kCountryHeader, path);

  std::vector<CountryRecord> out;
  std::set<CountryCode> seen;
  for (const auto& row : doc.rows) {
    RowReader r(path, row, kCountryHeader.size());
    CountryRecord rec;
    rec.code = r.code(0);
    rec.name = r.cell(1);
    rec.region = r.cell(2);
    rec.population = r.number(3, "population");
    if (!(rec.population > 0.0)) r.fail("population must be positive");
    rec.gdp_usd = r.optional_number(4, "gdp_usd");
    if (rec.gdp_usd && *rec.gdp_usd <= 0.0) r.fail("gdp_usd must be positive");
    rec.sec_fraction = r.optional_number(5, "sec_fraction");
    if (rec.sec_fraction && (*rec.sec_fraction < 0.0 || *rec.sec_fraction > 1.0)) {
      r.fail("sec_fraction must lie in [0, 1]");
    }
    rec.muslim_pop = r.optional_number(6, "muslim_pop");
    if (rec.muslim_pop && *rec.muslim_pop < 0.0) {
      r.fail("muslim_pop must be non-negative", ErrorKind::NegativeValue);
    }

    std::size_t blanks = 0;
    for (std::size_t i = 7; i <= 10; ++i) blanks += r.cell(i).empty() ? 1 : 0;
    if (blanks != 0 && blanks != 4) r.fail("survey fractions must be all present or all blank");
    if (blanks == 0) {
      SurveyFractions s{r.number(7, "sigma_n"), r.number(8, "sigma_r"), r.number(9, "sigma_s"),
                        r.number(10, "sigma_o")};
      for (double f : {s.never, s.rarely, s.sometimes, s.often}) {
        if (f < 0.0 || f > 1.0) r.fail("survey fraction outside [0, 1]");
      }
      if (s.total() > 1.0 + kSurveySlack) {
        r.fail(fmt::format("survey fractions sum to {} > 1", s.total()));
      }
      rec.survey = s;
    }
    rec.is_oecd = r.flag(11, "is_oecd");
    rec.is_target = r.flag(12, "is_target");

    if (!seen.insert(rec.code).second) {
      r.fail("duplicate code " + rec.code.str(), ErrorKind::DuplicateCode);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

PairTable load_pair_table(const fs::path& path, PairKind kind) {
  const auto doc = read_csv(path);
  require_header(doc, kPairHeader, path);

  PairTable table(kind);
  for (const auto& row : doc.rows) {
    RowReader r(path, row, 3);
    const auto origin = r.code(0);
    const auto dest = r.code(1);
    const double value = r.number(2, "value");
    if (value < 0.0) {
      r.fail(fmt::format("negative value {} for {}->{}", value, origin.str(), dest.str()),
             ErrorKind::NegativeValue);
    }
    if (table.find(origin, dest)) {
      r.fail(fmt::format("duplicate pair {}->{}", origin.str(), dest.str()));
    }
    if (kind == PairKind::distance) {
      if (const auto reverse = table.find(dest, origin)) {
        const double scale = std::max(std::abs(*reverse), std::abs(value));
        if (std::abs(*reverse - value) > kDistanceRelTol * scale) {
          r.fail(fmt::format("d({0},{1})={2} but d({1},{0})={3}", origin.str(), dest.str(), value,
                             *reverse),
                 ErrorKind::AsymmetricDistance);
        }
      }
    }
    table.insert(origin, dest, value);
  }

  if (kind == PairKind::distance) {
    std::vector<std::pair<CodePair, double>> mirrored;
    for (const auto& [pair, value] : table.entries()) {
      if (!table.find(pair.second, pair.first)) mirrored.push_back({{pair.second, pair.first}, value});
    }
    for (const auto& [pair, value] : mirrored) table.insert(pair.first, pair.second, value);
  }
  return table;
}

bool has_pre_estimated(const fs::path& dir) {
  for (const char* name : {kSupplyFile, kBarriersFile, kInterceptionFile, kYieldFile}) {
    if (fs::exists(dir / name)) return true;
  }
  return false;
}

ModelParams load_pre_estimated(const fs::path& dir) {
  std::vector<std::string> missing;
  for (const char* name : {kSupplyFile, kBarriersFile, kInterceptionFile, kYieldFile}) {
    if (!fs::is_regular_file(dir / name)) missing.emplace_back(name);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw Error(ErrorKind::MissingFile, dir.string() + ": missing " + list);
  }

  ModelParams params;
  params.supply = load_code_values(dir / kSupplyFile, kSupplyHeader, false);
  params.interception = load_code_values(dir / kInterceptionFile, kInterceptionHeader, false);
  params.yield = load_code_values(dir / kYieldFile, kYieldHeader, true);
  for (const auto& [code, y] : params.yield) {
    if (y > 0.0) {
      throw Error(ErrorKind::MalformedRow,
                  fmt::format("{}: yield for {} is positive ({})",
                              (dir / kYieldFile).string(), code.str(), y));
    }
    if (!params.interception.contains(code)) {
      throw Error(ErrorKind::CodeMismatch,
                  fmt::format("{} has a yield but no interception cost", code.str()));
    }
  }

  const auto path = dir / kBarriersFile;
  const auto doc = read_csv(path);
  require_header(doc, kBarrierHeader, path);
  for (const auto& row : doc.rows) {
    RowReader r(path, row, 3);
    const auto origin = r.code(0);
    const auto dest = r.code(1);
    const auto cost = parse_cost(r.cell(2));
    if (!cost) r.fail(fmt::format("cost is not a number or 'inf': '{}'", r.cell(2)));
    if (*cost < 0.0) r.fail("negative barrier cost", ErrorKind::NegativeValue);
    if (params.barriers.contains({origin, dest})) {
      r.fail(fmt::format("duplicate pair {}->{}", origin.str(), dest.str()));
    }
    params.set_barrier(origin, dest, *cost);
  }
  params.force_domestic_zero();
  return params;
}

DataBundle load_bundle(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorKind::MissingFile, "no such directory: " + dir.string());

  DataBundle bundle;
  bundle.countries = load_country_table(dir / kCountriesFile);
  if (fs::exists(dir / kMigrationFile)) {
    bundle.migration = load_pair_table(dir / kMigrationFile, PairKind::migration);
  }
  if (fs::exists(dir / kDistanceFile)) {
    bundle.distances = load_pair_table(dir / kDistanceFile, PairKind::distance);
  }
  if (has_pre_estimated(dir)) bundle.pre_estimated = load_pre_estimated(dir);
  return bundle;
}

std::string_view to_string(IssueKind kind) noexcept {
  switch (kind) {
    case IssueKind::DuplicateCode: return "DuplicateCode";
    case IssueKind::UnknownCode: return "UnknownCode";
    case IssueKind::MissingSecurityData: return "MissingSecurityData";
    case IssueKind::InvalidPopulation: return "InvalidPopulation";
    case IssueKind::InvalidSurvey: return "InvalidSurvey";
    case IssueKind::NegativeValue: return "NegativeValue";
    case IssueKind::AsymmetricDistance: return "AsymmetricDistance";
    case IssueKind::NonzeroSelfDistance: return "NonzeroSelfDistance";
    case IssueKind::MissingDistance: return "MissingDistance";
  }
  return "Unknown";
}

ValidationReport validate_bundle(const DataBundle& bundle) {
  ValidationReport report;
  auto add = [&](IssueKind kind, std::string location, std::string message) {
    report.issues.push_back({kind, std::move(location), std::move(message)});
  };

  std::set<CountryCode> known;
  for (const auto& c : bundle.countries) {
    const std::string loc = "countries:" + c.code.str();
    if (!known.insert(c.code).second) add(IssueKind::DuplicateCode, loc, "code appears twice");
    if (!(c.population > 0.0) || !std::isfinite(c.population)) {
      add(IssueKind::InvalidPopulation, loc, "population must be positive");
    }
    if (c.is_target && (!c.sec_fraction || !std::isfinite(*c.sec_fraction))) {
      add(IssueKind::MissingSecurityData, loc, "target country lacks sec_fraction");
    }
    if (c.survey) {
      const auto& s = *c.survey;
      const bool in_range = s.never >= 0 && s.rarely >= 0 && s.sometimes >= 0 && s.often >= 0;
      if (!in_range || s.total() > 1.0 + kSurveySlack) {
        add(IssueKind::InvalidSurvey, loc, fmt::format("survey fractions sum to {}", s.total()));
      }
    }
  }

  auto check_pair = [&](const char* table, const CodePair& pair) {
    for (const auto* code : {&pair.first, &pair.second}) {
      if (!known.contains(*code)) {
        add(IssueKind::UnknownCode, fmt::format("{}:{}->{}", table, pair.first.str(), pair.second.str()),
            "unknown code " + code->str());
        return false;
      }
    }
    return true;
  };

  for (const auto& [pair, value] : bundle.migration.entries()) {
    check_pair("migration", pair);
    const std::string loc = fmt::format("migration:{}->{}", pair.first.str(), pair.second.str());
    if (value < 0.0) add(IssueKind::NegativeValue, loc, "negative migrant count");
    if (pair.first != pair.second && !bundle.distances.find(pair.first, pair.second)) {
      add(IssueKind::MissingDistance, loc, "no distance for migration pair");
    }
  }
  for (const auto& [pair, value] : bundle.distances.entries()) {
    check_pair("distance", pair);
    const std::string loc = fmt::format("distance:{}->{}", pair.first.str(), pair.second.str());
    if (value < 0.0) add(IssueKind::NegativeValue, loc, "negative distance");
    if (pair.first == pair.second) {
      if (value != 0.0) add(IssueKind::NonzeroSelfDistance, loc, "self distance must be 0");
      continue;
    }
    const auto reverse = bundle.distances.find(pair.second, pair.first);
    if (!reverse || std::abs(*reverse - value) > kDistanceRelTol * std::max(*reverse, value)) {
      add(IssueKind::AsymmetricDistance, loc, "distance table is not symmetric");
    }
  }

  if (bundle.pre_estimated) {
    const auto& p = *bundle.pre_estimated;
    auto check_code = [&](const char* table, const CountryCode& code) {
      if (!known.contains(code)) {
        add(IssueKind::UnknownCode, fmt::format("{}:{}", table, code.str()), "unknown code " + code.str());
      }
    };
    for (const auto& [code, _] : p.supply) check_code("supply", code);
    for (const auto& [code, _] : p.interception) check_code("interception", code);
    for (const auto& [code, _] : p.yield) check_code("yield", code);
    for (const auto& [pair, cost] : p.barriers) {
      // diagonal zeros are filled in on load, so only listed pairs are checked
      if (pair.first == pair.second) continue;
      check_pair("barriers", pair);
      if (cost < 0.0) {
        add(IssueKind::NegativeValue, fmt::format("barriers:{}->{}", pair.first.str(), pair.second.str()),
            "negative barrier cost");
      }
    }
  }
  return report;
}

std::string format_country_table(std::span<const CountryRecord> countries) {
  std::string out = csv_line(kCountryHeader);
  for (const auto& c : countries) {
    std::vector<std::string> cells = {c.code.str(), c.name, c.region, format_number(c.population),
                                      opt(c.gdp_usd), opt(c.sec_fraction), opt(c.muslim_pop)};
    if (c.survey) {
      for (double f : {c.survey->never, c.survey->rarely, c.survey->sometimes, c.survey->often}) {
        cells.push_back(format_number(f));
      }
    } else {
      cells.insert(cells.end(), 4, std::string());
    }
    cells.push_back(c.is_oecd ? "1" : "0");
    cells.push_back(c.is_target ? "1" : "0");
    out += csv_line(cells);
  }
  return out;
}

std::string format_pair_table(const PairTable& table) {
  std::string out = csv_line(kPairHeader);
  for (const auto& [pair, value] : table.entries()) {
    out += csv_line({pair.first.str(), pair.second.str(), format_number(value)});
  }
  return out;
}

std::string format_supply(const CodeMap& supply) { return format_code_values(supply, kSupplyHeader); }

std::string format_interception(const CodeMap& interception) {
  return format_code_values(interception, kInterceptionHeader);
}

std::string format_yield(const CodeMap& yield) { return format_code_values(yield, kYieldHeader); }

std::string format_barriers(const BarrierMatrix& barriers) {
  std::string out = csv_line(kBarrierHeader);
  for (const auto& [pair, cost] : barriers) {
    out += csv_line({pair.first.str(), pair.second.str(), format_number(cost)});
  }
  return out;
}

std::string format_validation_report(const ValidationReport& report) {
  std::string out = csv_line({"kind", "location", "message"});
  for (const auto& issue : report.issues) {
    out += csv_line({std::string(to_string(issue.kind)), issue.location, issue.message});
  }
  return out;
}

void write_pre_estimated(const fs::path& dir, const ModelParams& params) {
  write_text_file(dir / kSupplyFile, format_supply(params.supply));
  write_text_file(dir / kBarriersFile, format_barriers(params.barriers));
  write_text_file(dir / kInterceptionFile, format_interception(params.interception));
  write_text_file(dir / kYieldFile, format_yield(params.yield));
}

}  // namespace tnrisk
