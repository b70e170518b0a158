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

#ifndef AECLAB_KEY_VALUES_H_
#define AECLAB_KEY_VALUES_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace aeclab {

// Flat `key = value` configuration. Blank lines and lines starting with '#'
// are ignored. Later assignments override earlier ones.
using KeyValues = std::map<std::string, std::string>;

KeyValues ParseKeyValues(const std::string& text);
KeyValues ReadKeyValuesFile(const std::string& path);
std::string FormatKeyValues(const KeyValues& kv);

// Typed, consuming view over a KeyValues map. Each module pulls the keys it
// understands; Finish() rejects whatever nobody claimed.
class KeyReader {
 public:
  explicit KeyReader(KeyValues kv) : kv_(std::move(kv)) {}

  bool Has(const std::string& key) const { return kv_.count(key) > 0; }

  void Read(const std::string& key, std::string* out);
  void Read(const std::string& key, double* out);
  void Read(const std::string& key, int* out);
  void Read(const std::string& key, uint64_t* out);
  void Read(const std::string& key, bool* out);
  // Comma-separated list.
  void Read(const std::string& key, std::vector<double>* out);
  void Read(const std::string& key, std::vector<int>* out);
  void Read(const std::string& key, std::vector<std::string>* out);

  // Throws UsageError naming every key that was never read.
  void Finish() const;

 private:
  const std::string* Claim(const std::string& key);

  KeyValues kv_;
  std::set<std::string> used_;
};

std::vector<std::string> SplitList(const std::string& text, char sep = ',');

}  // namespace aeclab

#endif  // AECLAB_KEY_VALUES_H_
