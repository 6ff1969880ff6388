//! Sorting, crowding, hypervolume and the bounded archive on toy points.

use microgrid_dispatch::mocore::{
    crowding_distance, exclusive_contributions_2d, hypervolume_2d, non_dominated_sort, ParetoArchive,
};

fn main() {
    let pts: Vec<[f64; 2]> = vec![[1.0, 5.0], [2.0, 3.0], [3.0, 4.0], [4.0, 1.0], [5.0, 5.0], [2.5, 2.5]];
    for (k, front) in non_dominated_sort(&pts).iter().enumerate() {
        let members: Vec<[f64; 2]> = front.iter().map(|&i| pts[i]).collect();
        println!("front {k}: {members:?} crowding {:?}", crowding_distance(&members));
    }

    let reference = [6.0, 6.0];
    let first: Vec<[f64; 2]> = non_dominated_sort(&pts)[0].iter().map(|&i| pts[i]).collect();
    println!("hypervolume {:.3}", hypervolume_2d(&first, reference).unwrap());
    println!("exclusive contributions {:?}", exclusive_contributions_2d(&first, reference));

    let mut archive = ParetoArchive::new(3).with_hypervolume_guard(Some(reference));
    for p in &pts {
        let kept = archive.insert(*p);
        println!("insert {p:?}: kept {kept}, archive {:?}", archive.members());
    }
}
