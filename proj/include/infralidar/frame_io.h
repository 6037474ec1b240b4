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

#ifndef INFRALIDAR_FRAME_IO_H_
#define INFRALIDAR_FRAME_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "infralidar/geometry.h"

namespace infralidar {

inline constexpr std::string_view kFrameCsvHeader = "x,y,z,intensity";

/// `s<ID>_f<FRAME:06>.csv`
std::string FrameFileName(std::uint32_t sensor_id, std::int64_t frame_index);

void WriteFrameCsv(const std::filesystem::path& path,
                   const PointCloudFrame& frame);

/// Point ordinals are the row indices; sensor id, frame index and timestamp
/// come from the caller.
PointCloudFrame ReadFrameCsv(const std::filesystem::path& path,
                             std::uint32_t sensor_id, std::int64_t frame_index,
                             double timestamp);

}  // namespace infralidar

#endif  // INFRALIDAR_FRAME_IO_H_
