#pragma once

// Self-contained runnable C functions used by the transformation semantics
// suite: each fixture's function is transformed, the original and every
// variant are compiled, and their stdout must agree over the driver's fixed
// inputs. Everything here is plain C89-style code with no undefined
// behavior on the driven inputs.

#include <string>
#include <vector>

namespace vdtest {

struct RunnableFixture {
    const char* name;
    const char* fn;      // the unit under transformation
    const char* driver;  // main() exercising it over fixed inputs
};

inline const std::vector<RunnableFixture>& runnable_fixtures() {
    static const std::vector<RunnableFixture> fixtures = {
        {"abs_max",
         "int abs_max(int a, int b) {\n"
         "    int x = a;\n"
         "    int y = b;\n"
         "    if (x < 0) x = -x;\n"
         "    if (y < 0) y = -y;\n"
         "    if (x > y) return x; else return y;\n"
         "}\n",
         "int main(void) {\n"
         "    int i, j;\n"
         "    for (i = -3; i <= 3; i++)\n"
         "        for (j = -3; j <= 3; j++)\n"
         "            printf(\"%d \", abs_max(i, j));\n"
         "    return 0;\n"
         "}\n"},
        {"clamp",
         "int clamp(int v, int lo, int hi) {\n"
         "    if (v < lo) return lo;\n"
         "    if (v > hi) return hi;\n"
         "    return v;\n"
         "}\n",
         "int main(void) {\n"
         "    int i;\n"
         "    for (i = -5; i <= 15; i++) printf(\"%d \", clamp(i, 0, 10));\n"
         "    return 0;\n"
         "}\n"},
        {"sum_loop",
         "int sum_loop(int n) {\n"
         "    int s = 0;\n"
         "    int i;\n"
         "    for (i = 0; i < n; i++) {\n"
         "        s += i;\n"
         "    }\n"
         "    return s;\n"
         "}\n",
         "int main(void) {\n"
         "    int i;\n"
         "    for (i = 0; i < 12; i++) printf(\"%d \", sum_loop(i));\n"
         "    return 0;\n"
         "}\n"},
        {"while_count",
         "int while_count(int n) {\n"
         "    int c = 0;\n"
         "    while (n > 1) {\n"
         "        if (n % 2 == 0) n = n / 2; else n = 3 * n + 1;\n"
         "        c++;\n"
         "        if (c > 100) break;\n"
         "    }\n"
         "    return c;\n"
         "}\n",
         "int main(void) {\n"
         "    int i;\n"
         "    for (i = 1; i <= 20; i++) printf(\"%d \", while_count(i));\n"
         "    return 0;\n"
         "}\n"},
        {"cond_and",
         "int cond_and(int a, int b) {\n"
         "    int r = 0;\n"
         "    if (a > 0 && b > 0) r = a + b;\n"
         "    if (a >= 2 && b <= 3) r += 10;\n"
         "    return r;\n"
         "}\n",
         "int main(void) {\n"
         "    int i, j;\n"
         "    for (i = -2; i <= 4; i++)\n"
         "        for (j = -2; j <= 4; j++) printf(\"%d \", cond_and(i, j));\n"
         "    return 0;\n"
         "}\n"},
        {"cond_or",
         "int cond_or(int a, int b) {\n"
         "    int r = 1;\n"
         "    if (a < 0 || b < 0) r = -1;\n"
         "    if (a == 0 || b == 0) r = 0;\n"
         "    return r;\n"
         "}\n",
         "int main(void) {\n"
         "    int i, j;\n"
         "    for (i = -2; i <= 2; i++)\n"
         "        for (j = -2; j <= 2; j++) printf(\"%d \", cond_or(i, j));\n"
         "    return 0;\n"
         "}\n"},
        {"nested_if",
         "int nested_if(int a, int b) {\n"
         "    int r = 0;\n"
         "    if (a > 0)\n"
         "        if (b > 0) r = 1;\n"
         "        else r = 2;\n"
         "    return r;\n"
         "}\n",
         "int main(void) {\n"
         "    int i, j;\n"
         "    for (i = -1; i <= 1; i++)\n"
         "        for (j = -1; j <= 1; j++) printf(\"%d \", nested_if(i, j));\n"
         "    return 0;\n"
         "}\n"},
        {"else_if_ladder",
         "int else_if_ladder(int x) {\n"
         "    if (x < 10) return 1;\n"
         "    else if (x < 20) return 2;\n"
         "    else if (x < 30) return 3;\n"
         "    else return 4;\n"
         "}\n",
         "int main(void) {\n"
         "    int i;\n"
         "    for (i = 0; i < 40; i += 3) printf(\"%d \", else_if_ladder(i));\n"
         "    return 0;\n"
         "}\n"},
        {"loop_break",
         "int loop_break(int n) {\n"
         "    int i, s = 0;\n"
         "    for (i = 0; i < 100; i++) {\n"
         "        if (i >= n) break;\n"
         "        s += 2 * i;\n"
         "    }\n"
         "    return s;\n"
         "}\n",
         "int main(void) {\n"
         "    int i;\n"
         "    for (i = 0; i < 10; i++) printf(\"%d \", loop_break(i));\n"
         "    return 0;\n"
         "}\n"},
        {"loop_continue",
         "int loop_continue(int n) {\n"
         "    int i, s = 0;\n"
         "    for (i = 0; i < n; i++) {\n"
         "        if (i % 3 == 0) continue;\n"
         "        s += i;\n"
         "    }\n"
         "    return s;\n"
         "}\n",
         "int main(void) {\n"
         "    int i;\n"
         "    for (i = 0; i < 12; i++) printf(\"%d \", loop_continue(i));\n"
         "    return 0;\n"
         "}\n"},
        {"while_continue",
         "int while_continue(int n) {\n"
         "    int s = 0;\n"
         "    while (n > 0) {\n"
         "        n--;\n"
         "        if (n % 2 == 1) continue;\n"
         "        s += n;\n"
         "    }\n"
         "    return s;\n"
         "}\n",
         "int main(void) {\n"
         "    int i;\n"
         "    for (i = 0; i < 12; i++) printf(\"%d \", while_continue(i));\n"
         "    return 0;\n"
         "}\n"},
        {"do_while",
         "int do_while(int n) {\n"
         "    int s = 0;\n"
         "    do {\n"
         "        s += n;\n"
         "        n--;\n"
         "    } while (n > 0);\n"
         "    return s;\n"
         "}\n",
         "int main(void) {\n"
         "    int i;\n"
         "    for (i = 0; i < 8; i++) printf(\"%d \", do_while(i));\n"
         "    return 0;\n"
         "}\n"},
        {"for_infinite_break",
         "int for_infinite_break(int n) {\n"
         "    int i = 0, s = 0;\n"
         "    for (;;) {\n"
         "        if (i >= n) break;\n"
         "        s += i;\n"
         "        i++;\n"
         "    }\n"
         "    return s;\n"
         "}\n",
         "int main(void) {\n"
         "    int i;\n"
         "    for (i = 0; i < 8; i++) printf(\"%d \", for_infinite_break(i));\n"
         "    return 0;\n"
         "}\n"},
        {"for_no_init",
         "int for_no_init(int i, int n) {\n"
         "    int s = 0;\n"
         "    for (; i < n; i++) s += i;\n"
         "    return s;\n"
         "}\n",
         "int main(void) {\n"
         "    int i;\n"
         "    for (i = 0; i < 6; i++) printf(\"%d \", for_no_init(i, 8));\n"
         "    return 0;\n"
         "}\n"},
        {"for_no_step",
         "int for_no_step(int n) {\n"
         "    int i, s = 0;\n"
         "    for (i = 0; i < n;) {\n"
         "        s += i;\n"
         "        i += 2;\n"
         "    }\n"
         "    return s;\n"
         "}\n",
         "int main(void) {\n"
         "    int i;\n"
         "    for (i = 0; i < 9; i++) printf(\"%d \", for_no_step(i));\n"
         "    return 0;\n"
         "}\n"},
        {"array_sum",
         "int array_sum(const int *a, int n) {\n"
         "    int i, s = 0;\n"
         "    for (i = 0; i < n; i++) {\n"
         "        if (a[i] >= 0) s += a[i];\n"
         "    }\n"
         "    return s;\n"
         "}\n",
         "int main(void) {\n"
         "    int data[8] = {3, -1, 4, -1, 5, -9, 2, 6};\n"
         "    int i;\n"
         "    for (i = 0; i <= 8; i++) printf(\"%d \", array_sum(data, i));\n"
         "    return 0;\n"
         "}\n"},
        {"ptr_walk",
         "int ptr_walk(const int *p, int n) {\n"
         "    int s = 0;\n"
         "    const int *end = p + n;\n"
         "    while (p < end) {\n"
         "        s += *p;\n"
         "        p++;\n"
         "    }\n"
         "    return s;\n"
         "}\n",
         "int main(void) {\n"
         "    int data[6] = {1, 2, 3, 4, 5, 6};\n"
         "    int i;\n"
         "    for (i = 0; i <= 6; i++) printf(\"%d \", ptr_walk(data, i));\n"
         "    return 0;\n"
         "}\n"},
        {"str_len",
         "int str_len(const char *s) {\n"
         "    int n = 0;\n"
         "    while (*s != 0) {\n"
         "        n++;\n"
         "        s++;\n"
         "    }\n"
         "    return n;\n"
         "}\n",
         "int main(void) {\n"
         "    printf(\"%d %d %d \", str_len(\"\"), str_len(\"abc\"), str_len(\"hello world\"));\n"
         "    return 0;\n"
         "}\n"},
        {"bit_ops",
         "unsigned bit_ops(unsigned a, unsigned b) {\n"
         "    unsigned r = 0;\n"
         "    if ((a & 1) == 1) r |= 2;\n"
         "    if (a < b) r |= (a ^ b) << 1;\n"
         "    return r | (a >> 2);\n"
         "}\n",
         "int main(void) {\n"
         "    unsigned i, j;\n"
         "    for (i = 0; i < 6; i++)\n"
         "        for (j = 0; j < 6; j++) printf(\"%u \", bit_ops(i, j));\n"
         "    return 0;\n"
         "}\n"},
        {"ternary_mix",
         "int ternary_mix(int a, int b) {\n"
         "    int m = a > b ? a : b;\n"
         "    if (m >= 10) m = m - 10;\n"
         "    return m;\n"
         "}\n",
         "int main(void) {\n"
         "    int i, j;\n"
         "    for (i = 0; i < 15; i += 4)\n"
         "        for (j = 0; j < 15; j += 4) printf(\"%d \", ternary_mix(i, j));\n"
         "    return 0;\n"
         "}\n"},
        {"switch_case",
         "int switch_case(int x) {\n"
         "    int r = 0;\n"
         "    switch (x % 4) {\n"
         "        case 0: r = 10; break;\n"
         "        case 1: r = 20; break;\n"
         "        case 2:\n"
         "            if (x > 5) r = 30;\n"
         "            break;\n"
         "        default: r = 40; break;\n"
         "    }\n"
         "    return r;\n"
         "}\n",
         "int main(void) {\n"
         "    int i;\n"
         "    for (i = 0; i < 12; i++) printf(\"%d \", switch_case(i));\n"
         "    return 0;\n"
         "}\n"},
        {"gcd",
         "int gcd(int a, int b) {\n"
         "    while (b != 0) {\n"
         "        int t = a % b;\n"
         "        a = b;\n"
         "        b = t;\n"
         "    }\n"
         "    return a;\n"
         "}\n",
         "int main(void) {\n"
         "    printf(\"%d %d %d %d \", gcd(12, 18), gcd(7, 13), gcd(100, 75), gcd(9, 0));\n"
         "    return 0;\n"
         "}\n"},
        {"fib_iter",
         "int fib_iter(int n) {\n"
         "    int a = 0, b = 1, i;\n"
         "    for (i = 0; i < n; i++) {\n"
         "        int t = a + b;\n"
         "        a = b;\n"
         "        b = t;\n"
         "    }\n"
         "    return a;\n"
         "}\n",
         "int main(void) {\n"
         "    int i;\n"
         "    for (i = 0; i < 12; i++) printf(\"%d \", fib_iter(i));\n"
         "    return 0;\n"
         "}\n"},
        {"is_prime",
         "int is_prime(int n) {\n"
         "    int d;\n"
         "    if (n < 2) return 0;\n"
         "    for (d = 2; d * d <= n; d++) {\n"
         "        if (n % d == 0) return 0;\n"
         "    }\n"
         "    return 1;\n"
         "}\n",
         "int main(void) {\n"
         "    int i;\n"
         "    for (i = 0; i < 30; i++) printf(\"%d\", is_prime(i));\n"
         "    return 0;\n"
         "}\n"},
        {"min3",
         "int min3(int a, int b, int c) {\n"
         "    int m = a;\n"
         "    if (b < m) m = b;\n"
         "    if (c < m) {\n"
         "        m = c;\n"
         "    } else {\n"
         "        m = m + 0;\n"
         "    }\n"
         "    return m;\n"
         "}\n",
         "int main(void) {\n"
         "    printf(\"%d %d %d %d \", min3(1, 2, 3), min3(3, 2, 1), min3(2, 1, 3), min3(5, 5, 5));\n"
         "    return 0;\n"
         "}\n"},
        {"count_even",
         "int count_even(const int *a, int n) {\n"
         "    int i = 0, c = 0;\n"
         "    while (i < n) {\n"
         "        if (a[i] % 2 == 0) c++;\n"
         "        i++;\n"
         "    }\n"
         "    return c;\n"
         "}\n",
         "int main(void) {\n"
         "    int data[7] = {1, 2, 3, 4, 5, 6, 8};\n"
         "    int i;\n"
         "    for (i = 0; i <= 7; i++) printf(\"%d \", count_even(data, i));\n"
         "    return 0;\n"
         "}\n"},
        {"reverse_sum",
         "int reverse_sum(int *a, int n) {\n"
         "    int i = 0, j = n - 1, s = 0;\n"
         "    while (i < j) {\n"
         "        int t = a[i];\n"
         "        a[i] = a[j];\n"
         "        a[j] = t;\n"
         "        i++;\n"
         "        j--;\n"
         "    }\n"
         "    for (i = 0; i < n; i++) s += a[i] * (i + 1);\n"
         "    return s;\n"
         "}\n",
         "int main(void) {\n"
         "    int data[5] = {1, 2, 3, 4, 5};\n"
         "    printf(\"%d \", reverse_sum(data, 5));\n"
         "    printf(\"%d \", reverse_sum(data, 4));\n"
         "    return 0;\n"
         "}\n"},
        {"dot_product",
         "long dot_product(const int *a, const int *b, int n) {\n"
         "    long s = 0;\n"
         "    int i;\n"
         "    for (i = 0; i < n; i++) s += (long)a[i] * b[i];\n"
         "    return s;\n"
         "}\n",
         "int main(void) {\n"
         "    int u[4] = {1, 2, 3, 4};\n"
         "    int v[4] = {4, 3, 2, 1};\n"
         "    int i;\n"
         "    for (i = 0; i <= 4; i++) printf(\"%ld \", dot_product(u, v, i));\n"
         "    return 0;\n"
         "}\n"},
        {"range_check",
         "int range_check(int x, int lo, int hi) {\n"
         "    if (x < lo || x > hi) return -1;\n"
         "    if (x == lo && lo != hi) return 0;\n"
         "    return 1;\n"
         "}\n",
         "int main(void) {\n"
         "    int i;\n"
         "    for (i = -2; i <= 12; i++) printf(\"%d \", range_check(i, 0, 10));\n"
         "    return 0;\n"
         "}\n"},
        {"triangle_kind",
         "int triangle_kind(int a, int b, int c) {\n"
         "    if (a + b <= c || b + c <= a || a + c <= b) return 0;\n"
         "    if (a == b && b == c) return 3;\n"
         "    if (a == b || b == c || a == c) return 2;\n"
         "    return 1;\n"
         "}\n",
         "int main(void) {\n"
         "    int i, j;\n"
         "    for (i = 1; i <= 5; i++)\n"
         "        for (j = 1; j <= 5; j++) printf(\"%d \", triangle_kind(i, j, 4));\n"
         "    return 0;\n"
         "}\n"},
        {"digit_sum",
         "int digit_sum(int n) {\n"
         "    int s = 0;\n"
         "    if (n < 0) n = -n;\n"
         "    while (n > 0) {\n"
         "        s += n % 10;\n"
         "        n /= 10;\n"
         "    }\n"
         "    return s;\n"
         "}\n",
         "int main(void) {\n"
         "    int vals[6] = {0, 7, 42, 199, -305, 99999};\n"
         "    int i;\n"
         "    for (i = 0; i < 6; i++) printf(\"%d \", digit_sum(vals[i]));\n"
         "    return 0;\n"
         "}\n"},
        {"det2",
         "int det2(int a, int b, int c, int d) {\n"
         "    int det = a * d - b * c;\n"
         "    if (det < 0) det = -det;\n"
         "    return det;\n"
         "}\n",
         "int main(void) {\n"
         "    int i;\n"
         "    for (i = -3; i <= 3; i++) printf(\"%d \", det2(i, 2, 3, i + 1));\n"
         "    return 0;\n"
         "}\n"},
        {"bounded_pow",
         "long bounded_pow(int base, int exp) {\n"
         "    long r = 1;\n"
         "    int i;\n"
         "    for (i = 0; i < exp && i < 12; i++) {\n"
         "        r *= base;\n"
         "    }\n"
         "    return r;\n"
         "}\n",
         "int main(void) {\n"
         "    int i;\n"
         "    for (i = 0; i < 8; i++) printf(\"%ld \", bounded_pow(2, i));\n"
         "    for (i = 0; i < 5; i++) printf(\"%ld \", bounded_pow(-3, i));\n"
         "    return 0;\n"
         "}\n"},
        {"grade",
         "char grade(int score) {\n"
         "    if (score >= 90) return 'A';\n"
         "    if (score >= 80) return 'B';\n"
         "    if (score >= 70 && score < 80) return 'C';\n"
         "    if (score >= 60 || score == 55) return 'D';\n"
         "    return 'F';\n"
         "}\n",
         "int main(void) {\n"
         "    int i;\n"
         "    for (i = 0; i <= 100; i += 5) printf(\"%c\", grade(i));\n"
         "    return 0;\n"
         "}\n"},
        {"wrap_index",
         "int wrap_index(int i, int n) {\n"
         "    while (i >= n) i -= n;\n"
         "    while (i < 0) i += n;\n"
         "    return i;\n"
         "}\n",
         "int main(void) {\n"
         "    int i;\n"
         "    for (i = -7; i <= 13; i++) printf(\"%d \", wrap_index(i, 5));\n"
         "    return 0;\n"
         "}\n"},
    };
    return fixtures;
}

}  // namespace vdtest
