// Copyright 2026 The bellkc Authors
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

#include <charconv>
#include <cstdio>
#include <ostream>
#include <string>

#include "bellkc/harness.hpp"

namespace bellkc {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

template <typename T>
void append(std::string& s, T v) {
  char buf[24];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  s.append(buf, end);
}

}  // namespace

nlohmann::json event_log_header(std::uint64_t master_seed, std::uint64_t chunk_size,
                                std::uint64_t model_hash) {
  return {{"schema", "bellkc.events"},
          {"schema_version", 1},
          {"master_seed", master_seed},
          {"chunk_size", chunk_size},
          {"model_hash", hex64(model_hash)},
          {"fields", {"trial_id", "x_index", "y_index", "a", "b", "chunk_id"}}};
}

JsonlEventWriter::JsonlEventWriter(std::ostream& out, const nlohmann::json& header) : out_(&out) {
  *out_ << header.dump() << '\n';
}

void JsonlEventWriter::operator()(std::span<const TrialRecord> records) {
  std::string buf;
  buf.reserve(records.size() * 72);
  for (const auto& r : records) {
    buf += "{\"trial_id\":";
    append(buf, r.trial_id);
    buf += ",\"x_index\":";
    append(buf, r.x_index);
    buf += ",\"y_index\":";
    append(buf, r.y_index);
    buf += ",\"a\":";
    append(buf, r.a);
    buf += ",\"b\":";
    append(buf, r.b);
    buf += ",\"chunk_id\":";
    append(buf, r.chunk_id);
    buf += "}\n";
  }
  out_->write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

CsvEventWriter::CsvEventWriter(std::ostream& out) : out_(&out) {
  *out_ << "trial_id,x_index,y_index,a,b,chunk_id\n";
}

void CsvEventWriter::operator()(std::span<const TrialRecord> records) {
  std::string buf;
  buf.reserve(records.size() * 32);
  for (const auto& r : records) {
    append(buf, r.trial_id);
    buf += ',';
    append(buf, r.x_index);
    buf += ',';
    append(buf, r.y_index);
    buf += ',';
    append(buf, r.a);
    buf += ',';
    append(buf, r.b);
    buf += ',';
    append(buf, r.chunk_id);
    buf += '\n';
  }
  out_->write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

}  // namespace bellkc
