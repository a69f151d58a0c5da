//! Raw and simplified goals of the holes in an intrinsic `listLength`.

use lqh::session::{Config, Session};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let src = include_str!("../corpus/list_length_holes.lqh");
    println!("{src}");
    let a = Session::new(Config::default())?.analyze(src);
    for h in &a.holes {
        println!("{} : {}", h.site.name, h.goal.raw);
        println!("{} : {}   (simplified)", h.site.name, h.goal.simplified);
    }
    Ok(())
}
