#include "rzsr/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace rzsr {

namespace {

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw Error(ErrorCode::Config, "expected a boolean, got: " + v);
}

int parse_int(const std::string& v) {
  try {
    size_t pos = 0;
    int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw Error(ErrorCode::Config, "expected an integer, got: " + v);
  }
}

double parse_double(const std::string& v) {
  try {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw Error(ErrorCode::Config, "expected a number, got: " + v);
  }
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  size_t b = s.find_last_not_of(" \t\r\n");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

}  // namespace

void SRConfig::set(const std::string& key, const std::string& value) {
  if (key == "scale") scale = parse_int(value);
  else if (key == "depth_bins") depth_bins = parse_int(value);
  else if (key == "threshold") threshold = parse_double(value);
  else if (key == "patch_side") patch_side = parse_int(value);
  else if (key == "tile_stride") tile_stride = parse_int(value);
  else if (key == "k_divisor") k_divisor = parse_int(value);
  else if (key == "db_stride") db_stride = parse_int(value);
  else if (key == "mode") mode = parse_net_mode(value);
  else if (key == "retrieval") retrieval = parse_retrieval_mode(value);
  else if (key == "descriptor") descriptor = parse_descriptor_backend(value);
  else if (key == "channels") channels = parse_int(value);
  else if (key == "ensemble") ensemble = parse_bool(value);
  else if (key == "bp_iters") bp_iters = parse_int(value);
  else if (key == "seed") seed = uint64_t(std::stoull(value));
  else if (key == "audit") audit = parse_bool(value);
  else if (key == "max_iters") max_iters = parse_int(value);
  else if (key == "lr") lr = parse_double(value);
  else if (key == "min_lr") min_lr = parse_double(value);
  else if (key == "check_every") check_every = parse_int(value);
  else if (key == "augment") augment = parse_bool(value);
  else if (key == "degrade_mode") degrade_mode = (parse_degrade_mode(value), value);
  else if (key == "factor") factor = parse_int(value);
  else if (key == "noise_sigma") noise_sigma = parse_double(value);
  else if (key == "lambda1") lambda1 = parse_double(value);
  else if (key == "lambda2") lambda2 = parse_double(value);
  else if (key == "theta") theta = parse_double(value);
  else if (key == "image") image = value;
  else if (key == "depth") depth = value;
  else if (key == "kernel") kernel = value;
  else if (key == "features") features = value;
  else if (key == "reference") reference = value;
  else if (key == "test") test = value;
  else if (key == "out") out = value;
  else
    throw Error(ErrorCode::Config, "unknown config key: " + key);
}

std::string SRConfig::get(const std::string& key) const {
  auto num = [](double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);  // shortest round-trip form
  };
  if (key == "scale") return std::to_string(scale);
  if (key == "depth_bins") return std::to_string(depth_bins);
  if (key == "threshold") return num(threshold);
  if (key == "patch_side") return std::to_string(patch_side);
  if (key == "tile_stride") return std::to_string(tile_stride);
  if (key == "k_divisor") return std::to_string(k_divisor);
  if (key == "db_stride") return std::to_string(db_stride);
  if (key == "mode") return net_mode_name(mode);
  if (key == "retrieval") return retrieval_mode_name(retrieval);
  if (key == "descriptor") return descriptor_backend_name(descriptor);
  if (key == "channels") return std::to_string(channels);
  if (key == "ensemble") return ensemble ? "true" : "false";
  if (key == "bp_iters") return std::to_string(bp_iters);
  if (key == "seed") return std::to_string(seed);
  if (key == "audit") return audit ? "true" : "false";
  if (key == "max_iters") return std::to_string(max_iters);
  if (key == "lr") return num(lr);
  if (key == "min_lr") return num(min_lr);
  if (key == "check_every") return std::to_string(check_every);
  if (key == "augment") return augment ? "true" : "false";
  if (key == "degrade_mode") return degrade_mode;
  if (key == "factor") return std::to_string(factor);
  if (key == "noise_sigma") return num(noise_sigma);
  if (key == "lambda1") return num(lambda1);
  if (key == "lambda2") return num(lambda2);
  if (key == "theta") return num(theta);
  if (key == "image") return image;
  if (key == "depth") return depth;
  if (key == "kernel") return kernel;
  if (key == "features") return features;
  if (key == "reference") return reference;
  if (key == "test") return test;
  if (key == "out") return out;
  throw Error(ErrorCode::Config, "unknown config key: " + key);
}

const std::vector<std::string>& SRConfig::keys() {
  static const std::vector<std::string> k = {
      "scale",       "depth_bins", "threshold",  "patch_side", "tile_stride",
      "k_divisor",   "db_stride",  "mode",       "retrieval",  "descriptor",
      "channels",    "ensemble",   "bp_iters",   "seed",       "audit",
      "max_iters",   "lr",         "min_lr",     "check_every", "augment",
      "degrade_mode", "factor",    "noise_sigma", "lambda1",   "lambda2",
      "theta",       "image",      "depth",      "kernel",     "features",
      "reference",   "test",       "out"};
  return k;
}

void SRConfig::load_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::Io, "cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::Format, path + ":" + std::to_string(lineno) +
                                         ": expected key = value");
    set(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
  }
}

std::string SRConfig::to_json() const {
  nlohmann::json j;
  for (const auto& k : keys()) j[k] = get(k);
  return j.dump(2);
}

}  // namespace rzsr
