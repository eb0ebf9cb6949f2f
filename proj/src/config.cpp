#include "ssom/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ssom {

double odds(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("odds: probability must lie in (0, 1)");
  return std::log(p / (1.0 - p));
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v) {
  size_t used = 0;
  double d = std::stod(v, &used);
  if (trim(v.substr(used)).size()) throw std::invalid_argument("trailing characters");
  return d;
}

int parse_int(const std::string& v) {
  size_t used = 0;
  int i = std::stoi(v, &used);
  if (trim(v.substr(used)).size()) throw std::invalid_argument("trailing characters");
  return i;
}

std::vector<uint16_t> parse_id_list(const std::string& v) {
  std::vector<uint16_t> ids;
  std::string tok;
  std::istringstream in(v);
  while (std::getline(in, tok, ',')) {
    std::istringstream part(tok);
    std::string word;
    while (part >> word) ids.push_back(static_cast<uint16_t>(std::stoul(word)));
  }
  return ids;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  try {
    if (key == "width") width = parse_int(value);
    else if (key == "height") height = parse_int(value);
    else if (key == "fov_up_deg") fov_up_deg = parse_double(value);
    else if (key == "fov_down_deg") fov_down_deg = parse_double(value);
    else if (key == "min_range") min_range = parse_double(value);
    else if (key == "max_range") max_range = parse_double(value);
    else if (key == "p_stable") p_stable = parse_double(value);
    else if (key == "p_prior") p_prior = parse_double(value);
    else if (key == "p_penalty") p_penalty = parse_double(value);
    else if (key == "sigma_alpha") sigma_alpha = parse_double(value);
    else if (key == "sigma_d") sigma_d = parse_double(value);
    else if (key == "l_stable") l_stable = parse_double(value);
    else if (key == "l_unstable") l_unstable = parse_double(value);
    else if (key == "grace_frames") grace_frames = parse_int(value);
    else if (key == "alpha_max_deg") alpha_max_deg = parse_double(value);
    else if (key == "d_max") d_max = parse_double(value);
    else if (key == "init_prune_frames") init_prune_frames = parse_int(value);
    else if (key == "fuse_old_weight") fuse_old_weight = parse_double(value);
    else if (key == "flood_kernel") flood_kernel = parse_int(value);
    else if (key == "flood_theta") flood_theta = parse_double(value);
    else if (key == "huber_delta") huber_delta = parse_double(value);
    else if (key == "d_assoc") d_assoc = parse_double(value);
    else if (key == "alpha_assoc_deg") alpha_assoc_deg = parse_double(value);
    else if (key == "icp_max_iter") icp_max_iter = parse_int(value);
    else if (key == "icp_conv_eps") icp_conv_eps = parse_double(value);
    else if (key == "icp_max_halvings") icp_max_halvings = parse_int(value);
    else if (key == "gn_cond_cap") gn_cond_cap = parse_double(value);
    else if (key == "default_confidence") default_confidence = parse_double(value);
    else if (key == "class_table") class_table = trim(value);
    else if (key == "movable_classes") movable_classes = parse_id_list(value);
    else if (key == "seed") seed = static_cast<unsigned>(std::stoul(value));
    else if (key == "threads") threads = parse_int(value);
    else if (key == "eval_stride") eval_stride = parse_int(value);
    else throw std::invalid_argument("unknown config key '" + key + "'");
  } catch (const std::invalid_argument& e) {
    if (std::string(e.what()).rfind("unknown config key", 0) == 0) throw;
    throw std::invalid_argument("config key '" + key + "': bad value '" + value + "'");
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("config key '" + key + "': value out of range '" + value + "'");
  }
}

std::string RunConfig::to_string() const {
  std::ostringstream out;
  out << "width = " << width << "\n";
  out << "height = " << height << "\n";
  out << "fov_up_deg = " << fmt(fov_up_deg) << "\n";
  out << "fov_down_deg = " << fmt(fov_down_deg) << "\n";
  out << "min_range = " << fmt(min_range) << "\n";
  out << "max_range = " << fmt(max_range) << "\n";
  out << "p_stable = " << fmt(p_stable) << "\n";
  out << "p_prior = " << fmt(p_prior) << "\n";
  out << "p_penalty = " << fmt(p_penalty) << "\n";
  out << "sigma_alpha = " << fmt(sigma_alpha) << "\n";
  out << "sigma_d = " << fmt(sigma_d) << "\n";
  out << "l_stable = " << fmt(l_stable) << "\n";
  out << "l_unstable = " << fmt(l_unstable) << "\n";
  out << "grace_frames = " << grace_frames << "\n";
  out << "alpha_max_deg = " << fmt(alpha_max_deg) << "\n";
  out << "d_max = " << fmt(d_max) << "\n";
  out << "init_prune_frames = " << init_prune_frames << "\n";
  out << "fuse_old_weight = " << fmt(fuse_old_weight) << "\n";
  out << "flood_kernel = " << flood_kernel << "\n";
  out << "flood_theta = " << fmt(flood_theta) << "\n";
  out << "huber_delta = " << fmt(huber_delta) << "\n";
  out << "d_assoc = " << fmt(d_assoc) << "\n";
  out << "alpha_assoc_deg = " << fmt(alpha_assoc_deg) << "\n";
  out << "icp_max_iter = " << icp_max_iter << "\n";
  out << "icp_conv_eps = " << fmt(icp_conv_eps) << "\n";
  out << "icp_max_halvings = " << icp_max_halvings << "\n";
  out << "gn_cond_cap = " << fmt(gn_cond_cap) << "\n";
  out << "default_confidence = " << fmt(default_confidence) << "\n";
  out << "class_table = " << class_table << "\n";
  out << "movable_classes = ";
  for (size_t i = 0; i < movable_classes.size(); ++i)
    out << (i ? "," : "") << movable_classes[i];
  out << "\n";
  out << "seed = " << seed << "\n";
  out << "threads = " << threads << "\n";
  out << "eval_stride = " << eval_stride << "\n";
  return out.str();
}

void apply_config_stream(std::istream& in, RunConfig& cfg, const std::string& origin) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      cfg.set(key, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  RunConfig cfg;
  apply_config_stream(in, cfg, path);
  return cfg;
}

}  // namespace ssom
