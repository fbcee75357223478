// ndarray-linalg is used without a bundled backend; link the system LAPACK
// and BLAS (Debian/Ubuntu: liblapack-dev + libblas-dev, Fedora: lapack-devel
// + blas-devel) instead. LAPACK covers the decomposition routines; the BLAS
// library also exports the CBLAS interface that ndarray's matrix products
// bind against when its `blas` feature is active.
fn main() {
    println!("cargo:rustc-link-lib=dylib=lapack");
    println!("cargo:rustc-link-lib=dylib=blas");
}
