#pragma once

#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <sstream>
#include <string>

namespace paradox {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

template <typename T>
using Vec3 = std::array<T, 3>;

template <typename T>
using Mat3 = std::array<std::array<T, 3>, 3>;

using Vec3I = Vec3<Int>;
using Mat3I = Mat3<Int>;
using Vec3Q = Vec3<Rat>;
using Mat3Q = Mat3<Rat>;

template <typename T>
Mat3<T> mat3_identity() {
    return {{{T(1), T(0), T(0)}, {T(0), T(1), T(0)}, {T(0), T(0), T(1)}}};
}

template <typename T>
Mat3<T> mat3_mul(const Mat3<T>& a, const Mat3<T>& b) {
    Mat3<T> r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            T s = a[i][0] * b[0][j];
            s += a[i][1] * b[1][j];
            s += a[i][2] * b[2][j];
            r[i][j] = s;
        }
    return r;
}

template <typename T>
Vec3<T> mat3_apply(const Mat3<T>& a, const Vec3<T>& v) {
    Vec3<T> r{};
    for (int i = 0; i < 3; ++i) r[i] = a[i][0] * v[0] + a[i][1] * v[1] + a[i][2] * v[2];
    return r;
}

template <typename T>
Mat3<T> mat3_transpose(const Mat3<T>& a) {
    Mat3<T> r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i][j] = a[j][i];
    return r;
}

template <typename T>
T mat3_det(const Mat3<T>& a) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
           a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

template <typename T>
Mat3<T> mat3_scale(const Mat3<T>& a, const T& k) {
    Mat3<T> r = a;
    for (auto& row : r)
        for (auto& x : row) x *= k;
    return r;
}

template <typename T>
Vec3<T> vec3_scale(const Vec3<T>& v, const T& k) {
    return {v[0] * k, v[1] * k, v[2] * k};
}

template <typename T>
Vec3<T> vec3_add(const Vec3<T>& a, const Vec3<T>& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

template <typename T>
Vec3<T> vec3_sub(const Vec3<T>& a, const Vec3<T>& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

template <typename T>
T vec3_dot(const Vec3<T>& a, const Vec3<T>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

template <typename T>
bool vec3_is_zero(const Vec3<T>& v) {
    return v[0] == 0 && v[1] == 0 && v[2] == 0;
}

template <typename T>
std::string vec3_str(const Vec3<T>& v) {
    std::ostringstream os;
    os << "(" << v[0] << "," << v[1] << "," << v[2] << ")";
    return os.str();
}

// Exact orthogonality test for rational matrices: R^T R == I and det R == 1.
inline bool is_special_orthogonal(const Mat3Q& r) {
    return mat3_mul(mat3_transpose(r), r) == mat3_identity<Rat>() && mat3_det(r) == 1;
}

}  // namespace paradox
