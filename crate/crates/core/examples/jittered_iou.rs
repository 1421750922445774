//! IoU of a fixed-size prediction against a G x G ground-truth square as the
//! center offset grows, for a few prediction sides.
//!
//! cargo run --example jittered_iou

use centerbox::geometry::{iou, jittered_iou, BBox, CenterPoint, FixedSizeSpec};

fn main() -> centerbox::Result<()> {
    let g = 100.0;
    let sides = [98.0, 100.0, 101.5, 103.0];
    print!("{:>6}", "delta");
    for s in sides {
        print!("  S={s:<7}");
    }
    println!();
    for delta in [0.0, 0.5, 0.75, 1.0, 1.5, 2.0, 5.0] {
        print!("{delta:>6}");
        for s in sides {
            print!("  {:<9.6}", jittered_iou(&FixedSizeSpec::new(g, s)?, delta, delta));
        }
        println!();
    }

    // the closed form agrees with explicitly placed boxes
    let gt = BBox::centered_square(CenterPoint::new(500.0, 500.0)?, g)?;
    let pred = BBox::centered_square(CenterPoint::new(501.0, 499.0)?, 101.5)?;
    println!(
        "placed boxes: {:.12}  closed form: {:.12}",
        iou(&gt, &pred),
        jittered_iou(&FixedSizeSpec::new(g, 101.5)?, 1.0, 1.0)
    );
    Ok(())
}
