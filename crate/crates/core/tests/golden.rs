use std::path::PathBuf;

use maxtree::{
    brute_maxtree, build, load_pgm, maxtree_parallel, maxtree_uf, normalize, read_dump, validate, write_dump,
    Algorithm, BuildOptions, Connectivity, Image2D,
};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../testdata").join(name)
}

#[test]
fn uf_dump_matches_golden() {
    let img = load_pgm(data("sample_2x2.pgm")).unwrap();
    let mut out = Vec::new();
    write_dump(&img, &maxtree_uf(&img, Connectivity::C4), &mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), std::fs::read_to_string(data("sample_2x2.uf.dump")).unwrap());
}

#[test]
fn golden_dump_reads_back_as_oracle_tree() {
    let img = load_pgm(data("sample_2x2.pgm")).unwrap();
    let text = std::fs::read(data("sample_2x2.uf.dump")).unwrap();
    let (tree, levels) = read_dump(&text[..], img.len()).unwrap();
    assert_eq!(levels, img.values());
    assert!(validate(&img, &tree).is_ok());
    assert_eq!(normalize(&img, &tree).unwrap(), brute_maxtree(&img, Connectivity::C4));
}

#[test]
fn every_builder_agrees_on_sample() {
    let img = load_pgm(data("sample_2x2.pgm")).unwrap();
    let want = brute_maxtree(&img, Connectivity::C4);
    assert_eq!(want.node_level, vec![1, 2, 4, 3]);
    for algo in Algorithm::ALL {
        let opts = BuildOptions { bands: 2, ..Default::default() };
        let t = build(&img, algo, &opts).unwrap();
        assert_eq!(normalize(&img, &t).unwrap(), want, "{algo}");
    }
}

#[test]
fn single_band_equals_base() {
    let img = maxtree::synth::natural(40, 30, 5);
    for base in Algorithm::SEQUENTIAL {
        let seq = build(&img, base, &BuildOptions::default()).unwrap();
        let par = maxtree_parallel(&img, Connectivity::C4, base, 1, 1).unwrap();
        assert_eq!(normalize(&img, &seq).unwrap(), normalize(&img, &par).unwrap(), "{base}");
    }
}

#[test]
fn constant_band_collapses_into_neighbor() {
    // top band flat at 2, bottom band has both a 2 and a peak
    let img = Image2D::new(3, 2, 8, vec![2, 2, 2, 2, 5, 1]).unwrap();
    let t = maxtree_parallel(&img, Connectivity::C4, Algorithm::Uf, 2, 1).unwrap();
    let nt = normalize(&img, &t).unwrap();
    assert_eq!(nt, brute_maxtree(&img, Connectivity::C4));
    assert_eq!(nt.node_of[0], nt.node_of[3]);
}
