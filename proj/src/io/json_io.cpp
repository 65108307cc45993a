#include "hzdclf/io/json_io.hpp"

#include <cstring>
#include <fstream>

#include "hzdclf/errors.hpp"

namespace hzdclf {

nlohmann::json readJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
  return j;
}

void writeJsonFile(const std::string& path, const nlohmann::json& j, int indent) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << j.dump(indent) << "\n";
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

void requireSchema(const nlohmann::json& j, const std::string& schema, const std::string& where) {
  if (!j.is_object() || !j.contains("schema") || !j["schema"].is_string() ||
      j["schema"].get<std::string>() != schema) {
    throw ConfigError(where + ": expected schema \"" + schema + "\"");
  }
}

void requireKeysIn(const nlohmann::json& j, const std::vector<std::string>& allowed,
                   const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const auto& key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError(where + ": unknown field \"" + item.key() + "\"");
  }
}

const nlohmann::json& requireKey(const nlohmann::json& j, const std::string& key,
                                 const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(where + ": missing field \"" + key + "\"");
  }
  return j.at(key);
}

double numberAt(const nlohmann::json& j, const std::string& key, const std::string& where) {
  const auto& v = requireKey(j, key, where);
  if (!v.is_number()) throw ConfigError(where + ": field \"" + key + "\" must be a number");
  return v.get<double>();
}

double numberOr(const nlohmann::json& j, const std::string& key, double fallback,
                const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return numberAt(j, key, where);
}

int intAt(const nlohmann::json& j, const std::string& key, const std::string& where) {
  const auto& v = requireKey(j, key, where);
  if (!v.is_number_integer()) throw ConfigError(where + ": field \"" + key + "\" must be an integer");
  return v.get<int>();
}

bool boolAt(const nlohmann::json& j, const std::string& key, const std::string& where) {
  const auto& v = requireKey(j, key, where);
  if (!v.is_boolean()) throw ConfigError(where + ": field \"" + key + "\" must be a boolean");
  return v.get<bool>();
}

std::string stringAt(const nlohmann::json& j, const std::string& key, const std::string& where) {
  const auto& v = requireKey(j, key, where);
  if (!v.is_string()) throw ConfigError(where + ": field \"" + key + "\" must be a string");
  return v.get<std::string>();
}

nlohmann::json toJson(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vectorAt(const nlohmann::json& j, const std::string& key, const std::string& where,
                         int expected_size) {
  const auto& v = requireKey(j, key, where);
  if (!v.is_array()) throw ConfigError(where + ": field \"" + key + "\" must be an array");
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(where + ": field \"" + key + "\" must hold numbers");
    out(static_cast<int>(i)) = v[i].get<double>();
  }
  if (expected_size >= 0 && out.size() != expected_size) {
    throw ConfigError(where + ": field \"" + key + "\" has wrong length");
  }
  return out;
}

namespace {
constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decodeChar(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}
}  // namespace

std::string base64Encode(const std::uint8_t* data, std::size_t size) {
  std::string out;
  out.reserve((size + 2) / 3 * 4);
  for (std::size_t i = 0; i < size; i += 3) {
    std::uint32_t chunk = static_cast<std::uint32_t>(data[i]) << 16;
    if (i + 1 < size) chunk |= static_cast<std::uint32_t>(data[i + 1]) << 8;
    if (i + 2 < size) chunk |= data[i + 2];
    out.push_back(kAlphabet[(chunk >> 18) & 0x3f]);
    out.push_back(kAlphabet[(chunk >> 12) & 0x3f]);
    out.push_back(i + 1 < size ? kAlphabet[(chunk >> 6) & 0x3f] : '=');
    out.push_back(i + 2 < size ? kAlphabet[chunk & 0x3f] : '=');
  }
  return out;
}

std::vector<std::uint8_t> base64Decode(const std::string& text) {
  if (text.size() % 4 != 0) throw ConfigError("base64 payload length must be a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int vals[4];
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=') {
        if (i + 4 != text.size() || k < 2) throw ConfigError("bad base64 padding");
        vals[k] = 0;
        ++pad;
      } else {
        if (pad > 0) throw ConfigError("bad base64 padding");
        vals[k] = decodeChar(c);
        if (vals[k] < 0) throw ConfigError("bad base64 character");
      }
    }
    const std::uint32_t chunk = (static_cast<std::uint32_t>(vals[0]) << 18) |
                                (static_cast<std::uint32_t>(vals[1]) << 12) |
                                (static_cast<std::uint32_t>(vals[2]) << 6) |
                                static_cast<std::uint32_t>(vals[3]);
    out.push_back(static_cast<std::uint8_t>((chunk >> 16) & 0xff));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>((chunk >> 8) & 0xff));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(chunk & 0xff));
  }
  return out;
}

nlohmann::json matrixToJson(const Eigen::MatrixXd& m) {
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(m.size()) * sizeof(double));
  std::size_t offset = 0;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      const double value = m(r, c);
      std::memcpy(bytes.data() + offset, &value, sizeof(double));
      offset += sizeof(double);
    }
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", base64Encode(bytes.data(), bytes.size())}};
}

Eigen::MatrixXd matrixFromJson(const nlohmann::json& j, const std::string& where) {
  requireKeysIn(j, {"rows", "cols", "data"}, where);
  const int rows = intAt(j, "rows", where);
  const int cols = intAt(j, "cols", where);
  if (rows < 0 || cols < 0) throw ConfigError(where + ": negative matrix dimensions");
  const std::vector<std::uint8_t> bytes = base64Decode(stringAt(j, "data", where));
  if (bytes.size() != static_cast<std::size_t>(rows) * cols * sizeof(double)) {
    throw ConfigError(where + ": matrix payload size does not match dimensions");
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t offset = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double value;
      std::memcpy(&value, bytes.data() + offset, sizeof(double));
      m(r, c) = value;
      offset += sizeof(double);
    }
  }
  return m;
}

}  // namespace hzdclf
