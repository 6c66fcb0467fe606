#include "qrng/io.hpp"

#include "qrng/errors.hpp"

#include <system_error>
#include <unistd.h>

namespace qrng {

AtomicFileWriter::AtomicFileWriter(std::filesystem::path path)
    : path_(std::move(path)),
      tmp_(path_.string() + ".tmp." + std::to_string(::getpid())) {
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw IoError("cannot create " + tmp_.string());
}

AtomicFileWriter::~AtomicFileWriter() {
    if (!committed_) {
        out_.close();
        std::error_code ec;
        std::filesystem::remove(tmp_, ec);
    }
}

void AtomicFileWriter::write(std::span<const std::uint8_t> bytes) {
    out_.write(reinterpret_cast<const char*>(bytes.data()),
               static_cast<std::streamsize>(bytes.size()));
    if (!out_) throw IoError("write failed: " + tmp_.string());
}

void AtomicFileWriter::write(std::string_view text) {
    out_.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out_) throw IoError("write failed: " + tmp_.string());
}

void AtomicFileWriter::commit() {
    out_.close();
    if (!out_) throw IoError("close failed: " + tmp_.string());
    std::error_code ec;
    std::filesystem::rename(tmp_, path_, ec);
    if (ec) throw IoError("rename " + tmp_.string() + " -> " + path_.string() + ": " + ec.message());
    committed_ = true;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
    AtomicFileWriter w(path);
    w.write(text);
    w.commit();
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    AtomicFileWriter w(path);
    w.write(bytes);
    w.commit();
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    in.seekg(0, std::ios::end);
    const auto size = in.tellg();
    in.seekg(0, std::ios::beg);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
    if (size > 0) in.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!in) throw IoError("read failed: " + path.string());
    return bytes;
}

std::string read_file_text(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    return {bytes.begin(), bytes.end()};
}

}  // namespace qrng
