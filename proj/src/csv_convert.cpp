#include "evac/error.hpp"
#include "evac/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>

namespace evac::io {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Table {
public:
  Table(const std::filesystem::path& path) : name_(path.filename().string()) {
    rows_ = parse_csv(slurp(path));
    if (rows_.empty()) throw InputError(name_ + ": empty file");
    header_ = rows_.front();
    for (auto& h : header_) h = lower(trim(h));
    rows_.erase(rows_.begin());
  }

  /// Column index of the first alias present, if any.
  std::optional<std::size_t> column(std::initializer_list<const char*> aliases) const {
    for (const char* a : aliases) {
      auto it = std::find(header_.begin(), header_.end(), a);
      if (it != header_.end()) return static_cast<std::size_t>(it - header_.begin());
    }
    return std::nullopt;
  }

  std::size_t require(std::initializer_list<const char*> aliases) const {
    if (auto c = column(aliases)) return *c;
    throw InputError(name_ + ": missing column '" + *aliases.begin() + "'");
  }

  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  const std::string& name() const { return name_; }

private:
  std::string name_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string cell(const std::vector<std::string>& row, std::optional<std::size_t> col) {
  if (!col || *col >= row.size()) return "";
  return trim(row[*col]);
}

double to_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError(where + ": '" + s + "' is not a number");
  }
}

std::int64_t to_int(const std::string& s, const std::string& where) {
  const double v = to_double(s, where);
  if (v != static_cast<double>(static_cast<std::int64_t>(v))) throw InputError(where + ": '" + s + "' is not an integer");
  return static_cast<std::int64_t>(v);
}

bool to_bool(const std::string& s, const std::string& where) {
  const auto v = lower(s);
  if (v == "1" || v == "true" || v == "yes" || v == "y") return true;
  if (v == "0" || v == "false" || v == "no" || v == "n" || v.empty()) return false;
  throw InputError(where + ": '" + s + "' is not a boolean");
}

// WKT LINESTRING (lon lat, lon lat, ...) -> [[lat, lon], ...]
json parse_linestring(const std::string& wkt, const std::string& where) {
  const auto open = wkt.find('(');
  const auto close = wkt.rfind(')');
  if (lower(trim(wkt.substr(0, open == std::string::npos ? 0 : open))) != "linestring" || close == std::string::npos ||
      close < open) {
    throw InputError(where + ": geometry must be a WKT LINESTRING");
  }
  json out = json::array();
  std::stringstream body(wkt.substr(open + 1, close - open - 1));
  std::string pair;
  while (std::getline(body, pair, ',')) {
    std::istringstream xy(pair);
    double lon = 0.0;
    double lat = 0.0;
    if (!(xy >> lon >> lat)) throw InputError(where + ": bad LINESTRING vertex '" + trim(pair) + "'");
    out.push_back({lat, lon});
  }
  if (out.size() < 2) throw InputError(where + ": LINESTRING needs two vertices");
  return out;
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t k = 0; k < text.size(); ++k) {
    const char c = text[k];
    if (quoted) {
      if (c == '"' && k + 1 < text.size() && text[k + 1] == '"') {
        field += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n') {
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
      any = true;
    }
  }
  if (quoted) throw InputError("csv: unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

json convert_csv(const std::filesystem::path& nodes_csv, const std::filesystem::path& edges_csv, double dt_seconds) {
  const Table nodes(nodes_csv);
  const Table edges(edges_csv);

  const auto c_id = nodes.require({"id", "node_id", "osmid"});
  const auto c_lat = nodes.require({"lat", "latitude", "y"});
  const auto c_lon = nodes.require({"lon", "lng", "longitude", "x"});
  const auto c_supply = nodes.column({"supply", "population"});
  const auto c_demand = nodes.column({"demand", "shelter_capacity", "capacity"});

  json jn = json::array();
  for (std::size_t r = 0; r < nodes.rows().size(); ++r) {
    const auto& row = nodes.rows()[r];
    const std::string where = nodes.name() + " row " + std::to_string(r + 2);
    json node = {{"id", cell(row, c_id)},
                 {"lat", to_double(cell(row, c_lat), where)},
                 {"lon", to_double(cell(row, c_lon), where)}};
    if (node["id"].get<std::string>().empty()) throw InputError(where + ": empty id");
    if (auto s = cell(row, c_supply); !s.empty()) node["supply"] = to_int(s, where);
    if (auto d = cell(row, c_demand); !d.empty()) node["demand"] = to_int(d, where);
    jn.push_back(std::move(node));
  }

  const auto c_u = edges.require({"u", "source", "from"});
  const auto c_v = edges.require({"v", "target", "to"});
  const auto c_speed = edges.column({"speed_mps", "speed"});
  const auto c_kph = edges.column({"speed_kph", "maxspeed"});
  const auto c_lanes = edges.column({"lanes"});
  const auto c_name = edges.column({"name"});
  const auto c_oneway = edges.column({"oneway"});
  const auto c_geom = edges.column({"geometry", "wkt"});
  if (!c_speed && !c_kph) throw InputError(edges.name() + ": missing column 'speed_mps' (or 'speed_kph')");

  json je = json::array();
  for (std::size_t r = 0; r < edges.rows().size(); ++r) {
    const auto& row = edges.rows()[r];
    const std::string where = edges.name() + " row " + std::to_string(r + 2);
    const std::string mps = cell(row, c_speed);
    const double speed = !mps.empty() ? to_double(mps, where) : to_double(cell(row, c_kph), where) / 3.6;
    json edge = {{"u", cell(row, c_u)}, {"v", cell(row, c_v)}, {"speed_mps", speed}};
    if (auto l = cell(row, c_lanes); !l.empty()) edge["lanes"] = to_int(l, where);
    if (auto n = cell(row, c_name); !n.empty()) edge["name"] = n;
    if (c_oneway) edge["oneway"] = to_bool(cell(row, c_oneway), where);
    if (auto g = cell(row, c_geom); !g.empty()) edge["geometry"] = parse_linestring(g, where);
    je.push_back(std::move(edge));
  }
  return {{"dt_seconds", dt_seconds}, {"nodes", jn}, {"edges", je}};
}

}  // namespace evac::io
