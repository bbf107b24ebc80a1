use gonal::corpus;
use gonal::rank::rank;
use gonal::trees::find_tree_decomposition;
use std::time::Instant;

fn main() {
    for (name, g, n) in [
        ("k33", corpus::k33(), 3usize),
        ("petersen", corpus::petersen(), 4),
        ("heawood", corpus::heawood(), 5),
        ("pappus", corpus::pappus(), 6),
    ] {
        let t = Instant::now();
        let found = find_tree_decomposition(&g, n).unwrap();
        match found {
            Some(d) => {
                let root = d.root_divisor(1).unwrap();
                let r = rank(&root).rank;
                println!(
                    "{name}: roots {:?} found in {:?}; root divisor deg {} rank {}",
                    d.roots(),
                    t.elapsed(),
                    root.degree(),
                    r
                );
            }
            None => println!("{name}: none in {:?}", t.elapsed()),
        }
    }
}
