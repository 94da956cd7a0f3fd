#include "emcal/io.hpp"

#include <png.h>
#include <tiffio.h>

#include <glob.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

namespace emcal::io {

namespace fs = std::filesystem;

bool natural_less(const std::string& a, const std::string& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const bool da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
        const bool db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
        if (da && db) {
            std::size_t ie = i, je = j;
            while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
            while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
            // Compare digit runs by value: strip leading zeros, then length, then lexically.
            std::size_t is = i, js = j;
            while (is + 1 < ie && a[is] == '0') ++is;
            while (js + 1 < je && b[js] == '0') ++js;
            const auto la = ie - is, lb = je - js;
            if (la != lb) return la < lb;
            if (const int c = a.compare(is, la, b, js, lb); c != 0) return c < 0;
            if ((ie - i) != (je - j)) return (ie - i) < (je - j);
            i = ie;
            j = je;
        } else {
            if (a[i] != b[j]) return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    return (a.size() - i) < (b.size() - j);
}

std::vector<std::string> expand_inputs(const std::vector<std::string>& patterns) {
    std::vector<std::string> out;
    for (const auto& pattern : patterns) {
        if (pattern.find_first_of("*?[") == std::string::npos) {
            out.push_back(pattern);
            continue;
        }
        glob_t g{};
        const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
        if (rc == 0) {
            for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
        }
        globfree(&g);
        if (rc != 0) throw IoError("no files match '" + pattern + "'");
    }
    std::stable_sort(out.begin(), out.end(), natural_less);
    return out;
}

namespace {

std::string lower_extension(const fs::path& p) {
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw IoError("cannot open '" + path.string() + "'");
    return f;
}

// libpng reports errors through longjmp; this function holds no objects with destructors
// between setjmp and the reads.
bool read_png_rows(std::FILE* fp, png_structp png, png_infop info, std::vector<unsigned char>& data,
                   png_uint_32& width, png_uint_32& height, int& bit_depth, int& color_type) {
    if (setjmp(png_jmpbuf(png))) return false;
    png_init_io(png, fp);
    png_read_info(png, info);
    width = png_get_image_width(png, info);
    height = png_get_image_height(png, info);
    bit_depth = png_get_bit_depth(png, info);
    color_type = png_get_color_type(png, info);
    if (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_GRAY_ALPHA) return true;
    if (bit_depth < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
        bit_depth = 8;
    }
    if (color_type == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);
    const std::size_t row_bytes = png_get_rowbytes(png, info);
    data.resize(row_bytes * height);
    for (png_uint_32 y = 0; y < height; ++y) png_read_row(png, data.data() + y * row_bytes, nullptr);
    png_read_end(png, nullptr);
    return true;
}

ImagePlane read_png(const fs::path& path, const Resolution& res) {
    auto fp = open_file(path, "rb");
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw IoError("'" + path.string() + "' is not a PNG file");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng initialization failed for '" + path.string() + "'");
    }
    png_set_sig_bytes(png, 8);
    std::vector<unsigned char> data;
    png_uint_32 width = 0, height = 0;
    int bit_depth = 0, color_type = 0;
    const bool ok = read_png_rows(fp.get(), png, info, data, width, height, bit_depth, color_type);
    png_destroy_read_struct(&png, &info, nullptr);
    if (!ok) throw IoError("corrupt PNG '" + path.string() + "'");
    if (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_GRAY_ALPHA) {
        throw IoError("unsupported format: color PNG '" + path.string() + "' (grayscale required)");
    }

    Raster raw(height, width);
    if (bit_depth == 16) {
        for (png_uint_32 y = 0; y < height; ++y)
            for (png_uint_32 x = 0; x < width; ++x) {
                const auto* px = data.data() + (static_cast<std::size_t>(y) * width + x) * 2;
                raw(y, x) = static_cast<double>((px[0] << 8) | px[1]);
            }
        return ImagePlane(normalize_intensities(raw, BitDepth::U16), res);
    }
    for (png_uint_32 y = 0; y < height; ++y)
        for (png_uint_32 x = 0; x < width; ++x) raw(y, x) = data[static_cast<std::size_t>(y) * width + x];
    return ImagePlane(normalize_intensities(raw, BitDepth::U8), res);
}

ImagePlane read_tiff(const fs::path& path, const Resolution& res) {
    TIFFSetWarningHandler(nullptr);
    std::unique_ptr<TIFF, void (*)(TIFF*)> tif(TIFFOpen(path.c_str(), "r"), TIFFClose);
    if (!tif) throw IoError("cannot open TIFF '" + path.string() + "'");
    uint32_t width = 0, height = 0;
    uint16_t bps = 0, spp = 1, sample_format = SAMPLEFORMAT_UINT;
    TIFFGetField(tif.get(), TIFFTAG_IMAGEWIDTH, &width);
    TIFFGetField(tif.get(), TIFFTAG_IMAGELENGTH, &height);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_BITSPERSAMPLE, &bps);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLESPERPIXEL, &spp);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLEFORMAT, &sample_format);
    if (spp != 1 || (bps != 8 && bps != 16) || sample_format != SAMPLEFORMAT_UINT) {
        std::ostringstream os;
        os << "unsupported format: TIFF '" << path.string() << "' has " << spp << " sample(s) of " << bps
           << " bits (single-channel 8/16-bit unsigned required)";
        throw IoError(os.str());
    }
    if (TIFFIsTiled(tif.get())) throw IoError("unsupported format: tiled TIFF '" + path.string() + "'");
    Raster raw(height, width);
    std::vector<unsigned char> line(static_cast<std::size_t>(TIFFScanlineSize(tif.get())));
    for (uint32_t y = 0; y < height; ++y) {
        if (TIFFReadScanline(tif.get(), line.data(), y, 0) < 0) {
            throw IoError("failed reading row " + std::to_string(y) + " of '" + path.string() + "'");
        }
        for (uint32_t x = 0; x < width; ++x) {
            if (bps == 16) {
                uint16_t v;
                std::memcpy(&v, line.data() + 2 * x, 2);
                raw(y, x) = v;
            } else {
                raw(y, x) = line[x];
            }
        }
    }
    return ImagePlane(normalize_intensities(raw, bps == 16 ? BitDepth::U16 : BitDepth::U8), res);
}

ImagePlane read_pgm(const fs::path& path, const Resolution& res) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::string magic;
    in >> magic;
    if (magic != "P5" && magic != "P2") throw IoError("unsupported format: '" + path.string() + "' is not a PGM");
    auto next_int = [&]() {
        for (;;) {
            in >> std::ws;
            if (in.peek() == '#') {
                std::string comment;
                std::getline(in, comment);
                continue;
            }
            long v = -1;
            if (!(in >> v)) throw IoError("malformed PGM header in '" + path.string() + "'");
            return v;
        }
    };
    const long width = next_int(), height = next_int(), maxval = next_int();
    if (width < 1 || height < 1 || maxval < 1 || maxval > 65535) {
        throw IoError("malformed PGM header in '" + path.string() + "'");
    }
    Raster raw(height, width);
    if (magic == "P2") {
        for (long y = 0; y < height; ++y)
            for (long x = 0; x < width; ++x) raw(y, x) = static_cast<double>(next_int());
    } else {
        in.get();
        const int bytes = maxval < 256 ? 1 : 2;
        std::vector<unsigned char> buf(static_cast<std::size_t>(width * height * bytes));
        if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()))) {
            throw IoError("truncated PGM '" + path.string() + "'");
        }
        for (long y = 0; y < height; ++y)
            for (long x = 0; x < width; ++x) {
                const auto i = static_cast<std::size_t>((y * width + x) * bytes);
                raw(y, x) = bytes == 1 ? buf[i] : static_cast<double>((buf[i] << 8) | buf[i + 1]);
            }
    }
    if ((raw > static_cast<double>(maxval)).any()) throw IoError("PGM sample exceeds maxval in '" + path.string() + "'");
    return ImagePlane(raw / static_cast<double>(maxval), res);
}

std::vector<unsigned char> to_u16_be(const ImagePlane& plane) {
    std::vector<unsigned char> out(static_cast<std::size_t>(plane.width()) * plane.height() * 2);
    std::size_t i = 0;
    for (int y = 0; y < plane.height(); ++y)
        for (int x = 0; x < plane.width(); ++x) {
            const auto v = static_cast<unsigned>(std::lround(plane.at(x, y) * 65535.0));
            out[i++] = static_cast<unsigned char>(v >> 8);
            out[i++] = static_cast<unsigned char>(v & 0xff);
        }
    return out;
}

bool write_png_rows(std::FILE* fp, png_structp png, png_infop info, const std::vector<unsigned char>& data,
                    int width, int height) {
    if (setjmp(png_jmpbuf(png))) return false;
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 16,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < height; ++y) {
        png_write_row(png, const_cast<unsigned char*>(data.data() + static_cast<std::size_t>(y) * width * 2));
    }
    png_write_end(png, nullptr);
    return true;
}

}  // namespace

ImagePlane read_image(const fs::path& path, const Resolution& res) {
    if (!fs::exists(path)) throw IoError("file not found: '" + path.string() + "'");
    const auto ext = lower_extension(path);
    if (ext == ".png") return read_png(path, res);
    if (ext == ".tif" || ext == ".tiff") return read_tiff(path, res);
    if (ext == ".pgm" || ext == ".pnm") return read_pgm(path, res);
    throw IoError("unsupported format '" + ext + "' for '" + path.string() + "' (expected PNG, TIFF or PGM)");
}

ImageStack load_stack(std::vector<std::string> paths, double dx_nm, double dy_nm) {
    if (paths.empty()) throw IoError("no input images");
    const Resolution res(dx_nm, dy_nm);
    std::stable_sort(paths.begin(), paths.end(), natural_less);
    std::vector<ImagePlane> planes;
    planes.reserve(paths.size());
    for (const auto& p : paths) {
        auto plane = read_image(p, res);
        if (!planes.empty() &&
            (plane.width() != planes.front().width() || plane.height() != planes.front().height())) {
            std::ostringstream os;
            os << "'" << p << "' is " << plane.width() << "x" << plane.height() << ", expected "
               << planes.front().width() << "x" << planes.front().height() << " (as '" << paths.front() << "')";
            throw DataError(os.str());
        }
        planes.push_back(std::move(plane));
    }
    return ImageStack(std::move(planes));
}

void write_png16(const fs::path& path, const ImagePlane& plane) {
    const auto data = to_u16_be(plane);
    const fs::path tmp = path.string() + ".tmp";
    {
        auto fp = open_file(tmp, "wb");
        png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        png_infop info = png ? png_create_info_struct(png) : nullptr;
        const bool ok = png && info && write_png_rows(fp.get(), png, info, data, plane.width(), plane.height());
        png_destroy_write_struct(&png, &info);
        if (!ok) throw IoError("failed writing PNG '" + path.string() + "'");
    }
    fs::rename(tmp, path);
}

void write_pgm16(const fs::path& path, const ImagePlane& plane) {
    const auto data = to_u16_be(plane);
    std::string content = "P5\n" + std::to_string(plane.width()) + " " + std::to_string(plane.height()) + "\n65535\n";
    content.append(reinterpret_cast<const char*>(data.data()), data.size());
    write_file_atomic(path, content);
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace emcal::io
