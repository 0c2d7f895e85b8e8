#include <cstdio>

int main() {
    std::puts("ltcalc: CLI wiring pending");
    return 0;
}
