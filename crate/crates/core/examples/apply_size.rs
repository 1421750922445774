//! Turn center-only or probability-vector detections into fixed-size boxes,
//! with and without clipping to the image.
//!
//! cargo run --example apply_size

use centerbox::annotation::Detection;
use centerbox::geometry::{BBox, CenterPoint};
use centerbox::postprocess::apply_fixed_size;

fn main() -> centerbox::Result<()> {
    let dets = vec![
        Detection::with_center(1, 4, CenterPoint::new(300.0, 200.0)?, 0.91),
        // a regressed box of the wrong size: only its midpoint is kept
        Detection::with_box(1, 2, BBox::new(10.0, 480.0, 87.0, 112.0)?, 0.55),
        // the last probability is background; class 6 wins here
        Detection {
            image_id: 1,
            category_id: None,
            bbox: None,
            score: 0.0,
            center: Some(CenterPoint::new(1000.0, 20.0)?),
            class_probs: Some(vec![0.02, 0.01, 0.0, 0.05, 0.1, 0.7, 0.02, 0.0, 0.1]),
        },
        // background wins: dropped
        Detection {
            image_id: 1,
            category_id: None,
            bbox: None,
            score: 0.0,
            center: Some(CenterPoint::new(500.0, 500.0)?),
            class_probs: Some(vec![0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.9]),
        },
    ];

    for (label, clip) in [("unclipped", None), ("clipped to 1024 x 1024", Some((1024.0, 1024.0)))] {
        println!("{label}:");
        for d in apply_fixed_size(&dets, 101.5, clip)? {
            let b = d.bbox.expect("sized");
            println!(
                "  class {} score {:.2}  box [{:.2}, {:.2}, {:.2}, {:.2}]",
                d.category_id.expect("labelled"),
                d.score,
                b.x_min,
                b.y_min,
                b.width,
                b.height
            );
        }
    }
    Ok(())
}
