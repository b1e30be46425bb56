//! The generated header must compile as C and as C++, and a C program must
//! link against the shared library and run.

use std::path::Path;
use std::process::Command;

fn check(compiler: &str, lang: &str) {
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let program = "#include \"revival.h\"\n\
        int main(void) {\n\
          RevivalLevels *set = 0;\n\
          RevivalParams p;\n\
          if (revival_levels_primes(5, &set) != REVIVAL_STATUS_OK) return 1;\n\
          revival_levels_params(set, &p);\n\
          revival_levels_free(set);\n\
          return p.a_den == 1 && REVIVAL_STENCIL_FIVE_POINT == 1 ? 0 : 1;\n\
        }\n";
    let dir = tempfile_dir();
    let src = dir.join("main.c");
    std::fs::write(&src, program).unwrap();
    let status = match Command::new(compiler)
        .args(["-x", lang, "-fsyntax-only", "-Wall", "-Werror", "-I"])
        .arg(&include)
        .arg(&src)
        .status()
    {
        Ok(s) => s,
        Err(_) => {
            eprintln!("{compiler} not available, skipping");
            return;
        }
    };
    assert!(status.success(), "{compiler} rejected revival.h");
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("header");
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn header_compiles_as_c() {
    check("cc", "c");
}

#[test]
fn header_compiles_as_cxx() {
    check("c++", "c++");
}

#[test]
fn c_program_links_and_runs() {
    // test binaries live in <target>/<profile>/deps, the shared library one level up
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().and_then(Path::parent).unwrap().to_path_buf();
    if !lib_dir.join("librevival_ffi.so").exists() {
        eprintln!("shared library not built, skipping");
        return;
    }
    let dir = tempfile_dir();
    let src = dir.join("run.c");
    std::fs::write(
        &src,
        "#include <stdio.h>\n#include \"revival.h\"\n\
         int main(void) {\n\
           RevivalLevels *set = 0;\n\
           RevivalParams p;\n\
           if (revival_levels_biperiodic(25, 10, &set) != REVIVAL_STATUS_OK) return 1;\n\
           revival_levels_params(set, &p);\n\
           printf(\"%zu %lld/%lld %lld/%lld\\n\", revival_levels_len(set), (long long)p.a_num,\n\
                  (long long)p.a_den, (long long)p.b_num, (long long)p.b_den);\n\
           revival_levels_free(set);\n\
           if (revival_levels_harmonic(2, NULL) != REVIVAL_STATUS_NULL_POINTER) return 2;\n\
           return revival_last_error() ? 0 : 3;\n\
         }\n",
    )
    .unwrap();
    let bin = dir.join("run");
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let Ok(status) = Command::new("cc")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg("-o")
        .arg(&bin)
        .arg("-L")
        .arg(&lib_dir)
        .arg("-lrevival_ffi")
        .arg(format!("-Wl,-rpath,{}", lib_dir.display()))
        .status()
    else {
        eprintln!("cc not available, skipping");
        return;
    };
    assert!(status.success(), "linking against librevival_ffi failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "35 1/2 0/1\n");
}
