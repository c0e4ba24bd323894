#include "shp/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace shp {

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

} // namespace

Rat rat_from_string(const std::string& raw) {
    std::string s;
    s.reserve(raw.size());
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty())
        fail_validation("BadNumber", "rational literal is nonempty", "empty rational literal");

    auto bad = [&]() -> Rat {
        fail_validation("BadNumber", "rational literal parses as p/q, integer, or decimal",
                        "cannot parse rational literal: " + raw);
    };

    if (auto slash = s.find('/'); slash != std::string::npos) {
        std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        if (num.empty() || den.empty()) return bad();
        try {
            Rat q(num + "/" + den, 10);
            if (q.get_den() == 0)
                fail_validation("BadNumber", "denominator is nonzero", "zero denominator: " + raw);
            q.canonicalize();
            return q;
        } catch (const std::invalid_argument&) {
            return bad();
        }
    }

    // integer or decimal, optional exponent
    int sign = 1;
    size_t i = 0;
    if (s[0] == '+' || s[0] == '-') {
        if (s[0] == '-') sign = -1;
        i = 1;
    }
    std::string digits;
    long frac_digits = 0, exp10 = 0;
    size_t dot = s.find('.', i);
    size_t e = s.find_first_of("eE", i);
    std::string mant = s.substr(i, (e == std::string::npos ? s.size() : e) - i);
    if (e != std::string::npos) {
        std::string es = s.substr(e + 1);
        if (es.empty()) return bad();
        int esign = 1;
        size_t j = 0;
        if (es[0] == '+' || es[0] == '-') {
            if (es[0] == '-') esign = -1;
            j = 1;
        }
        std::string ed = es.substr(j);
        if (!all_digits(ed) || ed.size() > 6) return bad();
        exp10 = esign * std::atol(ed.c_str());
    }
    dot = mant.find('.');
    if (dot == std::string::npos) {
        if (!all_digits(mant)) return bad();
        digits = mant;
    } else {
        std::string ip = mant.substr(0, dot), fp = mant.substr(dot + 1);
        if (ip.empty() && fp.empty()) return bad();
        if (!ip.empty() && !all_digits(ip)) return bad();
        if (!fp.empty() && !all_digits(fp)) return bad();
        digits = ip + fp;
        frac_digits = static_cast<long>(fp.size());
    }
    if (digits.empty()) return bad();

    Rat q{mpz_class(digits, 10)};
    long shift = exp10 - frac_digits;
    if (shift > 0) {
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(shift));
        q *= Rat(p);
    } else if (shift < 0) {
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(-shift));
        q /= Rat(p);
    }
    if (sign < 0) q = -q;
    q.canonicalize();
    return q;
}

Rat rat_from_double(double x) {
    if (!std::isfinite(x))
        fail_validation("BadNumber", "numeric input is finite", "non-finite double");
    Rat q;
    mpq_set_d(q.get_mpq_t(), x);
    q.canonicalize();
    return q;
}

std::string rat_to_string(const Rat& q) { return q.get_str(); }

double rat_to_double(const Rat& q) { return q.get_d(); }

RatVec rat_vec_from_strings(const std::vector<std::string>& v) {
    RatVec out;
    out.reserve(v.size());
    for (const auto& s : v) out.push_back(rat_from_string(s));
    return out;
}

std::vector<std::string> rat_vec_to_strings(const RatVec& v) {
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const auto& q : v) out.push_back(rat_to_string(q));
    return out;
}

} // namespace shp
