pub mod circle_net;
pub mod fig1;
pub mod fig2;
pub mod tensor;
pub mod verify;
