#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

namespace hzdclf {

// File helpers; both throw ConfigError with the path in the message.
nlohmann::json readJsonFile(const std::string& path);
void writeJsonFile(const std::string& path, const nlohmann::json& j, int indent = 2);

// Schema guards. All formats in this project are strict: a "schema" string
// must match and unknown keys are rejected so typos fail loudly.
void requireSchema(const nlohmann::json& j, const std::string& schema, const std::string& where);
void requireKeysIn(const nlohmann::json& j, const std::vector<std::string>& allowed,
                   const std::string& where);
const nlohmann::json& requireKey(const nlohmann::json& j, const std::string& key,
                                 const std::string& where);

double numberAt(const nlohmann::json& j, const std::string& key, const std::string& where);
double numberOr(const nlohmann::json& j, const std::string& key, double fallback,
                const std::string& where);
int intAt(const nlohmann::json& j, const std::string& key, const std::string& where);
bool boolAt(const nlohmann::json& j, const std::string& key, const std::string& where);
std::string stringAt(const nlohmann::json& j, const std::string& key, const std::string& where);

nlohmann::json toJson(const Eigen::VectorXd& v);
Eigen::VectorXd vectorAt(const nlohmann::json& j, const std::string& key, const std::string& where,
                         int expected_size = -1);

// Raw byte payloads for bit-exact numeric blocks.
std::string base64Encode(const std::uint8_t* data, std::size_t size);
std::vector<std::uint8_t> base64Decode(const std::string& text);

// Matrices travel as {rows, cols, data: base64 of row-major little-endian
// 64-bit floats}.
nlohmann::json matrixToJson(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrixFromJson(const nlohmann::json& j, const std::string& where);

}  // namespace hzdclf
