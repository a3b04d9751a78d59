#include "prnuda/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace prnuda {
namespace {

using cplx = std::complex<double>;
constexpr double kPi = 3.14159265358979323846;

bool is_pow2(std::size_t n) { return n && (n & (n - 1)) == 0; }

// In-place iterative radix-2 Cooley-Tukey. n must be a power of two.
void fft_pow2(cplx* a, std::size_t n, bool inverse) {
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx u = a[i + k];
                cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (std::size_t i = 0; i < n; ++i) a[i] /= static_cast<double>(n);
}

// Bluestein's algorithm for arbitrary n, expressed as a convolution of
// length >= 2n-1 carried out with the radix-2 transform above.
void fft_any(cplx* a, std::size_t n, bool inverse) {
    if (n <= 1) return;
    if (is_pow2(n)) {
        fft_pow2(a, n, inverse);
        return;
    }
    std::size_t m = 1;
    while (m < 2 * n - 1) m <<= 1;

    const double sign = inverse ? 1.0 : -1.0;
    std::vector<cplx> w(n);  // chirp
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 mod 2n avoids precision loss for large k
        std::size_t k2 = (k * k) % (2 * n);
        double ang = sign * kPi * static_cast<double>(k2) / static_cast<double>(n);
        w[k] = cplx(std::cos(ang), std::sin(ang));
    }
    std::vector<cplx> fa(m, cplx(0, 0)), fb(m, cplx(0, 0));
    for (std::size_t k = 0; k < n; ++k) fa[k] = a[k] * w[k];
    fb[0] = std::conj(w[0]);
    for (std::size_t k = 1; k < n; ++k) fb[k] = fb[m - k] = std::conj(w[k]);
    fft_pow2(fa.data(), m, false);
    fft_pow2(fb.data(), m, false);
    for (std::size_t k = 0; k < m; ++k) fa[k] *= fb[k];
    fft_pow2(fa.data(), m, true);
    for (std::size_t k = 0; k < n; ++k) a[k] = fa[k] * w[k];
    if (inverse)
        for (std::size_t k = 0; k < n; ++k) a[k] /= static_cast<double>(n);
}

// 2D transform of one channel, unshifted layout.
void fft2_channel(std::vector<cplx>& buf, int h, int w, bool inverse) {
    std::vector<cplx> col(h);
    for (int y = 0; y < h; ++y) fft_any(buf.data() + static_cast<std::size_t>(y) * w, w, inverse);
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) col[y] = buf[static_cast<std::size_t>(y) * w + x];
        fft_any(col.data(), h, inverse);
        for (int y = 0; y < h; ++y) buf[static_cast<std::size_t>(y) * w + x] = col[y];
    }
}

}  // namespace

Spectrum2D fft2(const Grid2D& g) {
    if (!g.finite()) throw std::invalid_argument("fft2: non-finite input");
    Spectrum2D s(g.channels, g.height, g.width);
    const int h = g.height, w = g.width;
    const int cy = s.dc_y(), cx = s.dc_x();
    std::vector<cplx> buf(static_cast<std::size_t>(h) * w);
    for (int c = 0; c < g.channels; ++c) {
        const double* src = g.channel(c);
        for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = cplx(src[i], 0.0);
        fft2_channel(buf, h, w, false);
        // shift: DC (unshifted index 0) lands on (cy, cx)
        for (int y = 0; y < h; ++y) {
            int sy = (y + cy) % h;
            for (int x = 0; x < w; ++x) {
                int sx = (x + cx) % w;
                const cplx& v = buf[static_cast<std::size_t>(y) * w + x];
                s.re[s.idx(c, sy, sx)] = v.real();
                s.im[s.idx(c, sy, sx)] = v.imag();
            }
        }
    }
    return s;
}

Grid2D ifft2(const Spectrum2D& s, double* imag_residue) {
    Grid2D g(s.channels, s.height, s.width);
    const int h = s.height, w = s.width;
    const int cy = s.dc_y(), cx = s.dc_x();
    std::vector<cplx> buf(static_cast<std::size_t>(h) * w);
    double residue = 0.0;
    for (int c = 0; c < s.channels; ++c) {
        for (int y = 0; y < h; ++y) {
            int sy = (y + cy) % h;
            for (int x = 0; x < w; ++x) {
                int sx = (x + cx) % w;
                std::size_t i = s.idx(c, sy, sx);
                buf[static_cast<std::size_t>(y) * w + x] = cplx(s.re[i], s.im[i]);
            }
        }
        fft2_channel(buf, h, w, true);
        double* dst = g.channel(c);
        for (std::size_t i = 0; i < buf.size(); ++i) {
            dst[i] = buf[i].real();
            residue = std::max(residue, std::abs(buf[i].imag()));
        }
    }
    if (imag_residue) *imag_residue = residue;
    return g;
}

std::pair<Grid2D, Grid2D> amp_phase(const Spectrum2D& s) {
    Grid2D amp(s.channels, s.height, s.width);
    Grid2D ph(s.channels, s.height, s.width);
    for (std::size_t i = 0; i < s.size(); ++i) {
        double a = std::hypot(s.re[i], s.im[i]);
        amp.data[i] = a;
        ph.data[i] = (a == 0.0) ? 0.0 : std::atan2(s.im[i], s.re[i]);
    }
    return {std::move(amp), std::move(ph)};
}

Spectrum2D recompose(const Grid2D& amplitude, const Grid2D& phase) {
    if (!amplitude.same_shape(phase))
        throw std::invalid_argument("recompose: shape mismatch");
    Spectrum2D s(amplitude.channels, amplitude.height, amplitude.width);
    for (std::size_t i = 0; i < s.size(); ++i) {
        s.re[i] = amplitude.data[i] * std::cos(phase.data[i]);
        s.im[i] = amplitude.data[i] * std::sin(phase.data[i]);
    }
    return s;
}

Grid2D softmax_channels(const Grid2D& logits) {
    const int k = logits.channels;
    if (k < 2) throw std::invalid_argument("softmax_channels: needs >= 2 channels");
    Grid2D p(k, logits.height, logits.width);
    const std::size_t plane = logits.plane();
    for (std::size_t j = 0; j < plane; ++j) {
        double m = logits.data[j];
        for (int c = 1; c < k; ++c) m = std::max(m, logits.data[c * plane + j]);
        double sum = 0.0;
        for (int c = 0; c < k; ++c) {
            double e = std::exp(logits.data[c * plane + j] - m);
            p.data[c * plane + j] = e;
            sum += e;
        }
        for (int c = 0; c < k; ++c) p.data[c * plane + j] /= sum;
    }
    return p;
}

LabelMap argmax_labels(const Grid2D& logits) {
    LabelMap out(logits.height, logits.width);
    const std::size_t plane = logits.plane();
    for (std::size_t j = 0; j < plane; ++j) {
        int best = 0;
        double bv = logits.data[j];
        for (int c = 1; c < logits.channels; ++c) {
            double v = logits.data[c * plane + j];
            if (v > bv) {
                bv = v;
                best = c;
            }
        }
        out.data[j] = best;
    }
    return out;
}

Grid2D max_softmax(const Grid2D& logits) {
    const int k = logits.channels;
    Grid2D out(1, logits.height, logits.width);
    const std::size_t plane = logits.plane();
    for (std::size_t j = 0; j < plane; ++j) {
        double m = logits.data[j];
        for (int c = 1; c < k; ++c) m = std::max(m, logits.data[c * plane + j]);
        double sum = 0.0, top = 0.0;
        for (int c = 0; c < k; ++c) {
            double e = std::exp(logits.data[c * plane + j] - m);
            sum += e;
            top = std::max(top, e);
        }
        out.data[j] = top / sum;
    }
    return out;
}

}  // namespace prnuda
