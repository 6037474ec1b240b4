// Copyright 2026 The Infralidar Authors
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

#include "infralidar/frame_io.h"

#include <cstdio>

#include "infralidar/csv.h"

namespace infralidar {

std::string FrameFileName(std::uint32_t sensor_id, std::int64_t frame_index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "s%u_f%06lld.csv", sensor_id,
                static_cast<long long>(frame_index));
  return buf;
}

void WriteFrameCsv(const std::filesystem::path& path,
                   const PointCloudFrame& frame) {
  CsvWriter w(kFrameCsvHeader);
  for (const Point& p : frame.points) {
    w.Field(p.x).Field(p.y).Field(p.z).Field(p.intensity).EndRow();
  }
  w.Save(path);
}

PointCloudFrame ReadFrameCsv(const std::filesystem::path& path,
                             std::uint32_t sensor_id, std::int64_t frame_index,
                             double timestamp) {
  CsvReader r(path, kFrameCsvHeader);
  PointCloudFrame frame;
  frame.sensor_id = sensor_id;
  frame.frame_index = frame_index;
  frame.timestamp = timestamp;
  while (r.Next()) {
    r.ExpectFields(4);
    frame.points.push_back({r.Double(0), r.Double(1), r.Double(2), r.Double(3)});
  }
  frame.AssignOrigins();
  return frame;
}

}  // namespace infralidar
