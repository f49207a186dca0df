#include "thermoscope/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "thermoscope/errors.hpp"
#include "thermoscope/units.hpp"

namespace thermoscope {

void write_pgm(const ImageFrame& frame, const std::string& path) {
  frame.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("pgm: cannot write '" + path + "'");

  std::ostringstream header;
  header << "P5\n";
  header << "# pixel_pitch_um " << units::m_to_um(frame.pixel_pitch) << "\n";
  header << frame.width_px << " " << frame.height_px << "\n65535\n";
  out << header.str();

  std::vector<unsigned char> bytes;
  bytes.reserve(frame.counts.size() * 2);
  for (double v : frame.counts) {
    const auto q = static_cast<std::uint16_t>(std::clamp(std::llround(v), 0LL, 65535LL));
    bytes.push_back(static_cast<unsigned char>(q >> 8));  // big-endian
    bytes.push_back(static_cast<unsigned char>(q & 0xff));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ValidationError("pgm: short write to '" + path + "'");
}

namespace {

// Reads the next whitespace-delimited PGM header token, capturing a pitch
// comment on the way.
std::string next_token(std::istream& in, double& pitch_um) {
  std::string tok;
  while (in) {
    const int c = in.peek();
    if (c == EOF) break;
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
      std::istringstream cs(comment.substr(1));
      std::string key;
      double value = 0.0;
      if (cs >> key >> value && key == "pixel_pitch_um") pitch_um = value;
      continue;
    }
    if (std::isspace(c)) {
      in.get();
      continue;
    }
    in >> tok;
    break;
  }
  return tok;
}

}  // namespace

ImageFrame read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("pgm: cannot open '" + path + "'");

  double pitch_um = 0.0;
  const std::string magic = next_token(in, pitch_um);
  if (magic != "P5") throw ValidationError("pgm: '" + path + "' is not binary PGM (P5)");
  const std::string ws = next_token(in, pitch_um);
  const std::string hs = next_token(in, pitch_um);
  const std::string ms = next_token(in, pitch_um);
  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(ws);
    height = std::stoi(hs);
    maxval = std::stoi(ms);
  } catch (const std::exception&) {
    throw ValidationError("pgm: malformed header in '" + path + "'");
  }
  if (width <= 0 || height <= 0 || maxval != 65535)
    throw ValidationError("pgm: expected positive dimensions and maxval 65535 in '" + path + "'");
  in.get();  // single whitespace after maxval

  ImageFrame frame = ImageFrame::zeros(width, height, pitch_um > 0.0 ? units::um_to_m(pitch_um) : 4e-6);
  std::vector<unsigned char> bytes(static_cast<std::size_t>(width) * height * 2);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
    throw ValidationError("pgm: truncated pixel data in '" + path + "'");
  for (std::size_t i = 0; i < frame.counts.size(); ++i)
    frame.counts[i] = static_cast<double>((static_cast<unsigned>(bytes[2 * i]) << 8) | bytes[2 * i + 1]);
  return frame;
}

void write_frame_csv(const ImageFrame& frame, const std::string& path) {
  frame.validate();
  std::ofstream out(path);
  if (!out) throw ValidationError("frame csv: cannot write '" + path + "'");
  out << "# pixel_pitch_um " << units::m_to_um(frame.pixel_pitch) << "\n";
  out.precision(17);
  for (int y = 0; y < frame.height_px; ++y) {
    for (int x = 0; x < frame.width_px; ++x) {
      if (x) out << ',';
      out << frame.at(y, x);
    }
    out << '\n';
  }
}

ImageFrame read_frame_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("frame csv: cannot open '" + path + "'");
  double pitch = 4e-6;
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream cs(line.substr(1));
      std::string key;
      double value = 0.0;
      if (cs >> key >> value && key == "pixel_pitch_um") pitch = units::um_to_m(value);
      continue;
    }
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ValidationError("frame csv: bad number '" + cell + "' in '" + path + "'");
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("frame csv: no data in '" + path + "'");
  const std::size_t width = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != width) throw ValidationError("frame csv: ragged rows in '" + path + "'");

  ImageFrame frame = ImageFrame::zeros(static_cast<int>(width), static_cast<int>(rows.size()), pitch);
  for (std::size_t y = 0; y < rows.size(); ++y)
    for (std::size_t x = 0; x < width; ++x) frame.at(static_cast<int>(y), static_cast<int>(x)) = rows[y][x];
  frame.validate();
  return frame;
}

}  // namespace thermoscope
