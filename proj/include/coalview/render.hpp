#pragma once

#include <array>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "coalview/layout.hpp"

namespace coalview {

struct RenderOptions {
    bool show_labels = true;
    bool population_gradient = false;
    std::string palette = "blues";
    double species_stroke = 1.5;
    double gene_stroke = 1.0;
    double margin = 24;
    double unit_x = 16;          // pixels per layout x unit
    double plot_height = 320;    // pixels between height 0 and the canvas top
};

namespace detail {

inline std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s = buf;
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    if (s == "-0") s = "0";
    return s;
}

inline std::string xml_escape(const std::string& in) {
    std::string out;
    for (char c : in) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::array<int, 3> palette_base(const std::string& name) {
    static const std::map<std::string, std::array<int, 3>> known{
        {"blues", {33, 102, 172}}, {"greens", {35, 139, 69}}, {"reds", {203, 24, 29}}, {"greys", {82, 82, 82}}};
    const auto it = known.find(name);
    if (it == known.end()) throw std::invalid_argument("unknown palette '" + name + "'");
    return it->second;
}

/// White blended toward the palette colour by t in [0, 1].
inline std::string tint(const std::array<int, 3>& base, double t) {
    char buf[16];
    int c[3];
    for (int i = 0; i < 3; ++i) c[i] = static_cast<int>(255.0 - t * (255.0 - base[i]) + 0.5);
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
    return buf;
}

}  // namespace detail

/// SVG 1.1 drawing of a layout. Species delimiters go in <g id="species">,
/// one <line> per gene segment in <g id="gene">; population fills, when
/// requested, sit underneath in <g id="population">.
inline std::string render_svg(const Layout& layout, const RenderOptions& opt = {}) {
    const double H = layout.height.to_double();
    const double W = layout.width.to_double();
    const double sy = H > 0 ? opt.plot_height / H : 1.0;
    const double label_room = opt.show_labels ? 28 : 0;
    const double vw = W * opt.unit_x + 2 * opt.margin;
    const double vh = opt.plot_height + 2 * opt.margin + label_room;
    auto X = [&](const Rational& x) { return detail::num(opt.margin + x.to_double() * opt.unit_x); };
    auto Y = [&](const Rational& y) { return detail::num(opt.margin + (H - y.to_double()) * sy); };
    using detail::num;

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(vw) << "\" height=\"" << num(vh)
        << "\" viewBox=\"0 0 " << num(vw) << ' ' << num(vh) << "\">\n";

    if (opt.population_gradient && layout.style == Style::Rectangular) {
        const auto base = detail::palette_base(opt.palette);
        bool any = false;
        double lo = 0, hi = 0;
        for (const auto& sh : layout.species) {
            if (!sh.population) continue;
            for (double v : {sh.population->bottom.to_double(), sh.population->top.to_double()}) {
                if (!any) lo = hi = v;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
                any = true;
            }
        }
        auto intensity = [&](const Rational& p) { return hi > lo ? 0.1 + 0.8 * (p.to_double() - lo) / (hi - lo) : 0.5; };
        std::ostringstream defs, rects;
        std::size_t k = 0;
        for (const auto& sh : layout.species) {
            if (!sh.population) continue;
            const auto& left = sh.left.front().x;
            const auto& right = sh.right.front().x;
            std::string fill;
            if (sh.population->bottom == sh.population->top) {
                fill = detail::tint(base, intensity(sh.population->bottom));
            } else {
                const std::string id = "pop" + std::to_string(k++);
                defs << "    <linearGradient id=\"" << id << "\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">"
                     << "<stop offset=\"0\" stop-color=\"" << detail::tint(base, intensity(sh.population->bottom)) << "\"/>"
                     << "<stop offset=\"1\" stop-color=\"" << detail::tint(base, intensity(sh.population->top)) << "\"/>"
                     << "</linearGradient>\n";
                fill = "url(#" + id + ")";
            }
            rects << "    <rect x=\"" << X(left) << "\" y=\"" << Y(sh.top) << "\" width=\""
                  << num((right - left).to_double() * opt.unit_x) << "\" height=\"" << num((sh.top - sh.bottom).to_double() * sy)
                  << "\" fill=\"" << fill << "\"/>\n";
        }
        if (any) {
            if (!defs.str().empty()) out << "  <defs>\n" << defs.str() << "  </defs>\n";
            out << "  <g id=\"population\" stroke=\"none\">\n" << rects.str() << "  </g>\n";
        }
    }

    out << "  <g id=\"species\" fill=\"none\" stroke=\"#555555\" stroke-width=\"" << num(opt.species_stroke) << "\">\n";
    for (const auto& sh : layout.species) {
        std::string d;
        if (layout.style == Style::Proportional) {
            for (std::size_t i = 0; i < sh.left.size(); ++i) d += (i ? " L" : "M") + X(sh.left[i].x) + ',' + Y(sh.left[i].y);
            for (std::size_t i = sh.right.size(); i-- > 0;) d += " L" + X(sh.right[i].x) + ',' + Y(sh.right[i].y);
            d += " Z";
        } else {
            for (const auto* side : {&sh.left, &sh.right}) {
                if (!d.empty()) d += ' ';
                for (std::size_t i = 0; i < side->size(); ++i)
                    d += (i ? " L" : "M") + X((*side)[i].x) + ',' + Y((*side)[i].y);
            }
        }
        out << "    <path d=\"" << d << "\"/>\n";
    }
    out << "  </g>\n";

    out << "  <g id=\"gene\" stroke=\"#111111\" stroke-width=\"" << num(opt.gene_stroke) << "\" stroke-linecap=\"round\">\n";
    auto line = [&](const Point& a, const Point& b) {
        out << "    <line x1=\"" << X(a.x) << "\" y1=\"" << Y(a.y) << "\" x2=\"" << X(b.x) << "\" y2=\"" << Y(b.y) << "\"/>\n";
    };
    for (const auto& e : layout.edges)
        for (std::size_t i = 0; i + 1 < e.path.size(); ++i) line(e.path[i], e.path[i + 1]);
    for (const auto& h : layout.horizontals) line(h.left, h.right);
    out << "  </g>\n";

    if (opt.show_labels) {
        out << "  <g id=\"labels\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">\n";
        const std::string species_y = num(opt.margin + opt.plot_height + 24);
        for (std::size_t v = 0; v < layout.gene_label.size(); ++v) {
            if (layout.gene_label[v].empty()) continue;
            const auto& p = layout.vertex.at(v);
            out << "    <text x=\"" << X(p.x) << "\" y=\"" << num(opt.margin + (H - p.y.to_double()) * sy + 12) << "\">"
                << detail::xml_escape(layout.gene_label[v]) << "</text>\n";
        }
        for (const auto& sh : layout.species) {
            if (sh.label.empty()) continue;
            const Rational mid = (sh.left.front().x + sh.right.front().x) / 2;
            out << "    <text x=\"" << X(mid) << "\" y=\"" << species_y << "\" font-weight=\"bold\">" << detail::xml_escape(sh.label)
                << "</text>\n";
        }
        out << "  </g>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace coalview
