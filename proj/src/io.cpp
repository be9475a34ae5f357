#include "kc/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kc/error.hpp"

namespace kc {

namespace {

std::string number17(double x) {
  if (!std::isfinite(x))
    return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s = buf;
  // keep it a JSON float so that round trips preserve the type
  if (s.find_first_of(".eE") == std::string::npos)
    s += ".0";
  return s;
}

void write(std::ostream& os, const nlohmann::json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* colon = indent > 0 ? ": " : ":";
  switch (j.type()) {
  case nlohmann::json::value_t::object: {
    if (j.empty()) {
      os << "{}";
      return;
    }
    os << '{';
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      os << (first ? "" : ",") << pad << nlohmann::json(it.key()).dump() << colon;
      write(os, it.value(), indent, depth + 1);
      first = false;
    }
    os << close << '}';
    return;
  }
  case nlohmann::json::value_t::array: {
    if (j.empty()) {
      os << "[]";
      return;
    }
    os << '[';
    bool first = true;
    for (const auto& v : j) {
      os << (first ? "" : ",") << pad;
      write(os, v, indent, depth + 1);
      first = false;
    }
    os << close << ']';
    return;
  }
  case nlohmann::json::value_t::number_float:
    os << number17(j.get<double>());
    return;
  default:
    os << j.dump();
  }
}

std::filesystem::path sidecar(const std::filesystem::path& bin) {
  std::filesystem::path s = bin;
  return s.replace_extension(".json");
}

void ensure_parent(const std::filesystem::path& path) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  ensure_parent(path);
  std::ofstream os(path, mode | std::ios::trunc);
  if (!os)
    throw ConfigError("cannot write " + path.string());
  return os;
}

} // namespace

std::string dump_json(const nlohmann::json& j, int indent) {
  std::ostringstream os;
  write(os, j, indent, 0);
  return os.str();
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  auto os = open_out(path);
  os << dump_json(j) << '\n';
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is)
    throw ConfigError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_field(const std::filesystem::path& bin_path, const Field& f, double alpha) {
  auto os = open_out(bin_path, std::ios::binary);
  for (double x : f.values()) {
    auto bits = std::bit_cast<std::uint64_t>(x);
    if constexpr (std::endian::native == std::endian::big)
      bits = __builtin_bswap64(bits);
    os.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
  if (!os)
    throw ConfigError("short write to " + bin_path.string());
  write_json_file(sidecar(bin_path), {{"n", f.grid().n},
                                      {"L", f.grid().L},
                                      {"alpha", alpha},
                                      {"axis_order", "x,y,z (row-major, z fastest)"},
                                      {"dtype", "float64 little-endian"}});
}

Field read_field(const std::filesystem::path& bin_path) {
  const nlohmann::json meta = read_json_file(sidecar(bin_path));
  const Grid grid = make_grid(meta.at("n").get<int>(), meta.at("L").get<double>());
  std::ifstream is(bin_path, std::ios::binary);
  if (!is)
    throw ConfigError("cannot open " + bin_path.string());
  Field f(grid);
  for (double& x : f.values()) {
    std::uint64_t bits = 0;
    is.read(reinterpret_cast<char*>(&bits), sizeof bits);
    if constexpr (std::endian::native == std::endian::big)
      bits = __builtin_bswap64(bits);
    x = std::bit_cast<double>(bits);
  }
  if (!is)
    throw ConfigError(bin_path.string() + " is shorter than its sidecar says");
  return f;
}

void write_iterations_csv(const std::filesystem::path& path,
                          const std::vector<IterationRecord>& history) {
  auto os = open_out(path);
  os << "iter,M,J_res,strong_res,t_star,step\n";
  for (const IterationRecord& r : history)
    os << r.iter << ',' << number17(r.M) << ',' << number17(r.J_res) << ','
       << number17(r.strong_res) << ',' << number17(r.t_star) << ',' << number17(r.step) << '\n';
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& points) {
  auto os = open_out(path);
  os << "mu,nu,m,converged,iters\n";
  for (const SweepPoint& p : points)
    os << number17(p.mu) << ',' << number17(p.nu) << ',' << number17(p.m) << ','
       << (p.converged ? 1 : 0) << ',' << p.iterations << '\n';
}

} // namespace kc
