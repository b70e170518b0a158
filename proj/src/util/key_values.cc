// Copyright 2026 The aeclab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "aeclab/key_values.h"

#include <fstream>
#include <sstream>

#include "aeclab/error.h"

namespace aeclab {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double ToDouble(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw UsageError("config key '" + key + "': not a number: " + v);
}

long long ToInteger(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used == v.size()) return i;
  } catch (const std::exception&) {
  }
  throw UsageError("config key '" + key + "': not an integer: " + v);
}

}  // namespace

std::vector<std::string> SplitList(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

KeyValues ParseKeyValues(const std::string& text) {
  KeyValues kv;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    line = Trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(line_no) +
                       ": expected key = value");
    }
    const std::string key = Trim(line.substr(0, eq));
    if (key.empty()) {
      throw UsageError("config line " + std::to_string(line_no) + ": empty key");
    }
    kv[key] = Trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues ReadKeyValuesFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseKeyValues(ss.str());
}

std::string FormatKeyValues(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

const std::string* KeyReader::Claim(const std::string& key) {
  auto it = kv_.find(key);
  if (it == kv_.end()) return nullptr;
  used_.insert(key);
  return &it->second;
}

void KeyReader::Read(const std::string& key, std::string* out) {
  if (const auto* v = Claim(key)) *out = *v;
}

void KeyReader::Read(const std::string& key, double* out) {
  if (const auto* v = Claim(key)) *out = ToDouble(key, *v);
}

void KeyReader::Read(const std::string& key, int* out) {
  if (const auto* v = Claim(key)) *out = static_cast<int>(ToInteger(key, *v));
}

void KeyReader::Read(const std::string& key, uint64_t* out) {
  if (const auto* v = Claim(key)) {
    const long long i = ToInteger(key, *v);
    if (i < 0) throw UsageError("config key '" + key + "' must be >= 0");
    *out = static_cast<uint64_t>(i);
  }
}

void KeyReader::Read(const std::string& key, bool* out) {
  if (const auto* v = Claim(key)) {
    if (*v == "true" || *v == "1" || *v == "yes") {
      *out = true;
    } else if (*v == "false" || *v == "0" || *v == "no") {
      *out = false;
    } else {
      throw UsageError("config key '" + key + "': not a boolean: " + *v);
    }
  }
}

void KeyReader::Read(const std::string& key, std::vector<double>* out) {
  if (const auto* v = Claim(key)) {
    out->clear();
    for (const auto& item : SplitList(*v)) out->push_back(ToDouble(key, item));
  }
}

void KeyReader::Read(const std::string& key, std::vector<int>* out) {
  if (const auto* v = Claim(key)) {
    out->clear();
    for (const auto& item : SplitList(*v)) {
      out->push_back(static_cast<int>(ToInteger(key, item)));
    }
  }
}

void KeyReader::Read(const std::string& key, std::vector<std::string>* out) {
  if (const auto* v = Claim(key)) *out = SplitList(*v);
}

void KeyReader::Finish() const {
  std::string unknown;
  for (const auto& [k, v] : kv_) {
    if (used_.count(k) == 0) unknown += (unknown.empty() ? "" : ", ") + k;
  }
  if (!unknown.empty()) throw UsageError("unknown config key(s): " + unknown);
}

}  // namespace aeclab
